"""Scenario file schema: domain object, JSON (de)serialization, validation.

A scenario is one JSON document holding the network, fleet, commodity
space, infrastructure catalogs, signed demand schedule, operating
assumptions and fidelity configuration. Every cross-reference is by id and
checked by :func:`load_scenario`.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field, replace

from .. import commodity as cm
from ..commodity import (
    Commodity,
    CommoditySpace,
    DemandEntry,
    DemandSchedule,
    EnergyStorageEntry,
    IsruCatalogEntry,
    PowerCatalogEntry,
    StorageCatalogEntry,
)
from ..errors import ParseError, ValidationError
from ..network import (
    NodeSpec,
    TimeGrid,
    TransportEdge,
    VehicleSpec,
    build_time_grid,
    expand,
)


@dataclass(frozen=True)
class OperationsConfig:
    """Mission operation assumptions."""

    launch_interval_days: float
    supply_node: str
    maintenance_rate: float = 0.0  # fraction of system mass per year
    maintenance_categories: tuple[str, ...] = (
        cm.CAT_INFRA,
        cm.CAT_POWER,
        cm.CAT_ENERGY,
    )
    spare_commodity: str | None = None
    solar_day_hours: float = 708.0
    power_system: str | None = None
    energy_buffer: str | None = None
    supply_cap: float = 1e9


@dataclass(frozen=True)
class PrefixedConfig:
    """How to derive and apply the prefixed infrastructure bundle."""

    bundle_id: str
    members: tuple[str, ...]
    reference_product: str
    reference_chain: tuple[str, ...]
    reference_rate: float = 1.0  # kg/hr of reference product
    storage_days: float | None = None  # default: launch interval
    storage_scale: float = 1.0


@dataclass(frozen=True)
class FidelityConfig:
    packing_n: int | None = None  # None = pack every non-singleton set
    pack_idle_holdover: bool = False
    prefixed: PrefixedConfig | None = None


@dataclass
class ScenarioFile:
    """Validated in-memory scenario."""

    name: str
    grid: TimeGrid
    nodes: tuple[NodeSpec, ...]
    edges: tuple[TransportEdge, ...]
    vehicles: tuple[VehicleSpec, ...]
    space: CommoditySpace
    demands: DemandSchedule
    operations: OperationsConfig
    objective_launch_edge: tuple[str, str]
    isru_nodes: tuple[str, ...] = ()
    isru_catalog: tuple[IsruCatalogEntry, ...] = ()
    storage_catalog: tuple[StorageCatalogEntry, ...] = ()
    power_catalog: tuple[PowerCatalogEntry, ...] = ()
    energy_storage_catalog: tuple[EnergyStorageEntry, ...] = ()
    fidelity: FidelityConfig = field(default_factory=FidelityConfig)
    productivity: float = 1.0
    description: str = ""
    _graph_cache: object = field(default=None, repr=False, compare=False)

    # --- derived accessors -------------------------------------------------

    def expanded(self):
        if self._graph_cache is None:
            self._graph_cache = expand(
                list(self.nodes), list(self.edges), list(self.vehicles), self.grid
            )
        return self._graph_cache

    def power_entry(self) -> PowerCatalogEntry | None:
        pid = self.operations.power_system
        if pid is None:
            return None
        for e in self.power_catalog:
            if e.id == pid:
                return e
        return None

    def energy_buffer_entry(self) -> EnergyStorageEntry | None:
        bid = self.operations.energy_buffer
        if bid is None:
            return None
        for e in self.energy_storage_catalog:
            if e.id == bid:
                return e
        return None

    @property
    def prefixed_config(self) -> PrefixedConfig | None:
        return self.fidelity.prefixed

    # --- prefixed transformation -------------------------------------------

    def with_prefixed_bundle(self, fractions: dict[str, float]) -> "ScenarioFile":
        """Collapse the configured bundle members into one commodity whose
        coefficients are the fraction-weighted blend of its members."""
        cfg = self.prefixed_config
        members = set(cfg.members)
        bundle_id = cfg.bundle_id

        commodities = []
        inserted = False
        for c in self.space:
            if c.id in members:
                if not inserted:
                    commodities.append(
                        Commodity(bundle_id, cm.CONTINUOUS, "kg", cm.CAT_INFRA)
                    )
                    inserted = True
                continue
            commodities.append(c)
        space_pf = CommoditySpace(commodities)

        # blend plant entries into one synthetic production entry
        isru_pf = []
        out_rates: dict[str, float] = {}
        in_rates: dict[str, float] = {}
        power_per_kg = 0.0
        q_i = None
        for e in self.isru_catalog:
            if e.id not in members:
                isru_pf.append(e)
                continue
            f = fractions.get(e.id, 0.0)
            if f == 0.0:
                continue
            for cid, _ in e.outputs:
                out_rates[cid] = out_rates.get(cid, 0.0) + f * e.alpha(cid)
            for cid, _ in e.inputs:
                in_rates[cid] = in_rates.get(cid, 0.0) + f * e.beta(cid)
            power_per_kg += f * e.power_per_kg
            q_i = e.operating_hours_per_solar_day if q_i is None else q_i
        if out_rates or in_rates:
            isru_pf.append(
                IsruCatalogEntry(
                    id=bundle_id,
                    reference_product=cfg.reference_product,
                    specific_mass=1.0,
                    specific_power=power_per_kg,
                    outputs=tuple(sorted(out_rates.items())),
                    inputs=tuple(sorted(in_rates.items())),
                    operating_hours_per_solar_day=q_i or 708.0,
                )
            )

        # blend tanks into per-resource synthetic capacity on the bundle
        storage_pf = []
        cap_per_resource: dict[str, float] = {}
        resource_power: dict[str, float] = {}
        for s in self.storage_catalog:
            if s.id not in members:
                storage_pf.append(s)
                continue
            f = fractions.get(s.id, 0.0)
            cap_per_resource[s.stores] = (
                cap_per_resource.get(s.stores, 0.0) + f * s.capacity_per_kg
            )
            resource_power[s.stores] = max(
                resource_power.get(s.stores, 0.0), s.specific_power
            )
        for resource in sorted(cap_per_resource):
            cap = cap_per_resource[resource]
            storage_pf.append(
                StorageCatalogEntry(
                    id=bundle_id,
                    stores=resource,
                    specific_mass=(1.0 / cap) if cap > 0 else math.inf,
                    specific_power=resource_power[resource],
                )
            )

        power_pf = []
        ops = self.operations
        for p in self.power_catalog:
            if p.id not in members:
                power_pf.append(p)
                continue
            f = fractions.get(p.id, 0.0)
            if f > 0:
                power_pf.append(
                    replace(p, id=bundle_id, specific_output=f * p.specific_output)
                )
                if ops.power_system == p.id:
                    ops = replace(ops, power_system=bundle_id)
            elif ops.power_system == p.id:
                ops = replace(ops, power_system=None)

        energy_pf = []
        for b in self.energy_storage_catalog:
            if b.id not in members:
                energy_pf.append(b)
                continue
            f = fractions.get(b.id, 0.0)
            if f > 0:
                energy_pf.append(
                    replace(b, id=bundle_id, specific_energy=f * b.specific_energy)
                )
                if ops.energy_buffer == b.id:
                    ops = replace(ops, energy_buffer=bundle_id)
            elif ops.energy_buffer == b.id:
                ops = replace(ops, energy_buffer=None)

        entries = [
            e if e.commodity not in members else replace(e, commodity=bundle_id)
            for e in self.demands
        ]
        return replace(
            self,
            name=f"{self.name}/prefixed",
            space=space_pf,
            isru_catalog=tuple(isru_pf),
            storage_catalog=tuple(storage_pf),
            power_catalog=tuple(power_pf),
            energy_storage_catalog=tuple(energy_pf),
            demands=DemandSchedule(entries),
            operations=ops,
            _graph_cache=None,
        )

    # --- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        ops = self.operations
        fid = self.fidelity
        d = {
            "name": self.name,
            "description": self.description,
            "grid": {
                "horizon_days": self.grid.horizon_days,
                "step_days": self.grid.step_days,
            },
            "nodes": [
                {"id": n.id, "body_class": n.body_class} for n in self.nodes
            ],
            "isru_nodes": list(self.isru_nodes),
            "edges": [
                {
                    "from": e.from_node,
                    "to": e.to_node,
                    "delta_v_km_s": e.delta_v,
                    "tof_days": e.tof_days,
                    "windows": None
                    if e.windows is None
                    else [list(w) for w in e.windows],
                }
                for e in self.edges
            ],
            "vehicles": [
                {
                    "id": v.id,
                    "structure_mass_kg": v.structure_mass,
                    "propellant_capacity_kg": v.propellant_capacity,
                    "payload_capacity_kg": v.payload_capacity,
                    "isp_s": v.isp,
                    "propellant_components": [
                        [c, f] for c, f in v.propellant_components
                    ],
                }
                for v in self.vehicles
            ],
            "commodities": [
                {"id": c.id, "kind": c.kind, "unit": c.unit, "category": c.category}
                for c in self.space
            ],
            "isru_catalog": [
                {
                    "id": e.id,
                    "reference_product": e.reference_product,
                    "specific_mass_kg_per_kg_hr": e.specific_mass,
                    "specific_power_kw_per_kg_hr": e.specific_power,
                    "outputs": {c: r for c, r in e.outputs},
                    "inputs": {c: r for c, r in e.inputs},
                    "operating_hours_per_solar_day": e.operating_hours_per_solar_day,
                }
                for e in self.isru_catalog
            ],
            "storage_catalog": [
                {
                    "id": s.id,
                    "stores": s.stores,
                    "specific_mass_kg_per_kg": s.specific_mass,
                    "specific_power_kw_per_kg": s.specific_power,
                    "operating_hours_per_solar_day": s.operating_hours_per_solar_day,
                }
                for s in self.storage_catalog
            ],
            "power_catalog": [
                {
                    "id": p.id,
                    "kind": p.kind,
                    "specific_output_kw_per_kg": p.specific_output,
                    "working_hours_per_solar_day": p.working_hours_per_solar_day,
                    "degradation_rate": p.degradation_rate,
                    "degradation_period": p.degradation_period,
                }
                for p in self.power_catalog
            ],
            "energy_storage_catalog": [
                {
                    "id": b.id,
                    "specific_energy_kwh_per_kg": b.specific_energy,
                    "efficiency": b.efficiency,
                }
                for b in self.energy_storage_catalog
            ],
            "demands": [
                {
                    "node": e.node,
                    "time_days": e.time_days,
                    "commodity": e.commodity,
                    "amount": e.amount,
                }
                for e in self.demands
            ],
            "operations": {
                "launch_interval_days": ops.launch_interval_days,
                "supply_node": ops.supply_node,
                "maintenance_rate_per_year": ops.maintenance_rate,
                "maintenance_categories": list(ops.maintenance_categories),
                "spare_commodity": ops.spare_commodity,
                "solar_day_hours": ops.solar_day_hours,
                "power_system": ops.power_system,
                "energy_buffer": ops.energy_buffer,
                "supply_cap_kg": ops.supply_cap,
            },
            "objective": {
                "type": "imleo",
                "launch_edge": list(self.objective_launch_edge),
            },
            "fidelity": {
                "packing_n": fid.packing_n,
                "pack_idle_holdover": fid.pack_idle_holdover,
                "prefixed": None
                if fid.prefixed is None
                else {
                    "bundle_id": fid.prefixed.bundle_id,
                    "members": list(fid.prefixed.members),
                    "reference_product": fid.prefixed.reference_product,
                    "reference_chain": list(fid.prefixed.reference_chain),
                    "reference_rate_kg_per_hr": fid.prefixed.reference_rate,
                    "storage_days": fid.prefixed.storage_days,
                    "storage_scale": fid.prefixed.storage_scale,
                },
            },
            "productivity": self.productivity,
        }
        return d


def scenario_from_dict(d: dict) -> ScenarioFile:
    try:
        grid = build_time_grid(d["grid"]["horizon_days"], d["grid"]["step_days"])
        nodes = tuple(
            NodeSpec(n["id"], n.get("body_class", "orbit")) for n in d["nodes"]
        )
        edges = tuple(
            TransportEdge(
                e["from"],
                e["to"],
                e["delta_v_km_s"],
                e["tof_days"],
                None if e.get("windows") is None else tuple(tuple(w) for w in e["windows"]),
            )
            for e in d["edges"]
        )
        vehicles = tuple(
            VehicleSpec(
                v["id"],
                v["structure_mass_kg"],
                v["propellant_capacity_kg"],
                v["payload_capacity_kg"],
                v["isp_s"],
                tuple((c, f) for c, f in v["propellant_components"]),
            )
            for v in d["vehicles"]
        )
        space = CommoditySpace(
            Commodity(c["id"], c["kind"], c["unit"], c["category"])
            for c in d["commodities"]
        )
        isru = tuple(
            IsruCatalogEntry(
                id=e["id"],
                reference_product=e["reference_product"],
                specific_mass=e["specific_mass_kg_per_kg_hr"],
                specific_power=e["specific_power_kw_per_kg_hr"],
                outputs=tuple(sorted(e["outputs"].items())),
                inputs=tuple(sorted(e.get("inputs", {}).items())),
                operating_hours_per_solar_day=e.get(
                    "operating_hours_per_solar_day", 708.0
                ),
            )
            for e in d.get("isru_catalog", [])
        )
        storage = tuple(
            StorageCatalogEntry(
                id=s["id"],
                stores=s["stores"],
                specific_mass=s["specific_mass_kg_per_kg"],
                specific_power=s.get("specific_power_kw_per_kg", 0.0),
                operating_hours_per_solar_day=s.get(
                    "operating_hours_per_solar_day", 708.0
                ),
            )
            for s in d.get("storage_catalog", [])
        )
        power = tuple(
            PowerCatalogEntry(
                id=p["id"],
                kind=p["kind"],
                specific_output=p["specific_output_kw_per_kg"],
                working_hours_per_solar_day=p["working_hours_per_solar_day"],
                degradation_rate=p.get("degradation_rate", 0.0),
                degradation_period=p.get("degradation_period", "year"),
            )
            for p in d.get("power_catalog", [])
        )
        energy = tuple(
            EnergyStorageEntry(
                id=b["id"],
                specific_energy=b["specific_energy_kwh_per_kg"],
                efficiency=b["efficiency"],
            )
            for b in d.get("energy_storage_catalog", [])
        )
        demands = DemandSchedule(
            DemandEntry(e["node"], e["time_days"], e["commodity"], e["amount"])
            for e in d.get("demands", [])
        )
        ops_d = d["operations"]
        ops = OperationsConfig(
            launch_interval_days=ops_d["launch_interval_days"],
            supply_node=ops_d["supply_node"],
            maintenance_rate=ops_d.get("maintenance_rate_per_year", 0.0),
            maintenance_categories=tuple(
                ops_d.get(
                    "maintenance_categories",
                    [cm.CAT_INFRA, cm.CAT_POWER, cm.CAT_ENERGY],
                )
            ),
            spare_commodity=ops_d.get("spare_commodity"),
            solar_day_hours=ops_d.get("solar_day_hours", 708.0),
            power_system=ops_d.get("power_system"),
            energy_buffer=ops_d.get("energy_buffer"),
            supply_cap=ops_d.get("supply_cap_kg", 1e9),
        )
        fid_d = d.get("fidelity", {})
        pre_d = fid_d.get("prefixed")
        prefixed = None
        if pre_d is not None:
            prefixed = PrefixedConfig(
                bundle_id=pre_d["bundle_id"],
                members=tuple(pre_d["members"]),
                reference_product=pre_d["reference_product"],
                reference_chain=tuple(pre_d["reference_chain"]),
                reference_rate=pre_d.get("reference_rate_kg_per_hr", 1.0),
                storage_days=pre_d.get("storage_days"),
                storage_scale=pre_d.get("storage_scale", 1.0),
            )
        fidelity = FidelityConfig(
            packing_n=fid_d.get("packing_n"),
            pack_idle_holdover=fid_d.get("pack_idle_holdover", False),
            prefixed=prefixed,
        )
        return ScenarioFile(
            name=d.get("name", "unnamed"),
            description=d.get("description", ""),
            grid=grid,
            nodes=nodes,
            edges=edges,
            vehicles=vehicles,
            space=space,
            isru_nodes=tuple(d.get("isru_nodes", [])),
            isru_catalog=isru,
            storage_catalog=storage,
            power_catalog=power,
            energy_storage_catalog=energy,
            demands=demands,
            operations=ops,
            objective_launch_edge=tuple(d["objective"]["launch_edge"]),
            fidelity=fidelity,
            productivity=d.get("productivity", 1.0),
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed scenario document: {exc!r}") from exc


def validate_scenario(scn: ScenarioFile) -> list[str]:
    """Structural validation; returns every diagnostic found."""
    problems: list[str] = []
    node_ids = {n.id for n in scn.nodes}
    grid_days = set(scn.grid.steps)
    space = scn.space

    for e in scn.edges:
        for ref in (e.from_node, e.to_node):
            if ref not in node_ids:
                problems.append(f"edge {e.from_node}->{e.to_node}: unknown node {ref!r}")
    for v in scn.vehicles:
        if v.id not in space:
            problems.append(f"vehicle {v.id!r}: no matching commodity")
        elif space.get(v.id).category != cm.CAT_VEHICLE:
            problems.append(f"vehicle {v.id!r}: commodity not in vehicle category")
        for cid, _ in v.propellant_components:
            if cid not in space:
                problems.append(f"vehicle {v.id!r}: unknown propellant component {cid!r}")
    for n in scn.isru_nodes:
        if n not in node_ids:
            problems.append(f"isru node {n!r} undeclared")
    for e in scn.isru_catalog:
        if e.id not in space:
            problems.append(f"catalog entry {e.id!r}: no plant commodity")
        for cid, _ in e.outputs + e.inputs:
            if cid not in space:
                problems.append(f"catalog entry {e.id!r}: unknown commodity {cid!r}")
        if not e.stoichiometry_ok():
            problems.append(f"catalog entry {e.id!r}: outputs exceed inputs (mass balance)")
    for s in scn.storage_catalog:
        if s.id not in space:
            problems.append(f"storage {s.id!r}: no tank commodity")
        if s.stores not in space:
            problems.append(f"storage {s.id!r}: unknown stored commodity {s.stores!r}")
    for p in scn.power_catalog:
        if p.id not in space:
            problems.append(f"power {p.id!r}: no commodity")
    for b in scn.energy_storage_catalog:
        if b.id not in space:
            problems.append(f"energy storage {b.id!r}: no commodity")
    for d in scn.demands:
        if d.node not in node_ids:
            problems.append(f"demand references unknown node {d.node!r}")
        if d.commodity not in space:
            problems.append(f"demand references unknown commodity {d.commodity!r}")
        if not any(abs(d.time_days - g) < 1e-9 for g in grid_days):
            problems.append(f"demand at t={d.time_days} is off-grid")
    ops = scn.operations
    if ops.supply_node not in node_ids:
        problems.append(f"supply node {ops.supply_node!r} undeclared")
    if ops.maintenance_rate > 0 and ops.spare_commodity is None:
        problems.append("maintenance rate set but no spare commodity configured")
    if ops.spare_commodity is not None and ops.spare_commodity not in space:
        problems.append(f"spare commodity {ops.spare_commodity!r} unknown")
    if ops.power_system is not None and scn.power_entry() is None:
        problems.append(f"power system {ops.power_system!r} not in catalog")
    if ops.energy_buffer is not None and scn.energy_buffer_entry() is None:
        problems.append(f"energy buffer {ops.energy_buffer!r} not in catalog")
    lf, lt = scn.objective_launch_edge
    if not any(e.from_node == lf and e.to_node == lt for e in scn.edges):
        problems.append(f"objective launch edge {lf}->{lt} not in edge list")
    pre = scn.prefixed_config
    if pre is not None:
        for m in pre.members:
            if m not in space:
                problems.append(f"prefixed member {m!r} unknown")
        for c in pre.reference_chain:
            if c not in {e.id for e in scn.isru_catalog}:
                problems.append(f"prefixed chain entry {c!r} not in catalog")
    return problems


def load_scenario(path) -> ScenarioFile:
    """Load and fully validate a scenario document."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"cannot parse {path}: {exc}") from exc
    scn = scenario_from_dict(raw)
    problems = validate_scenario(scn)
    if problems:
        raise ValidationError(problems)
    return scn


def save_scenario(scn: ScenarioFile, path) -> None:
    """Atomic write (temp file + rename) of the scenario document."""
    payload = json.dumps(scn.to_dict(), indent=2, sort_keys=True)
    _atomic_write(path, payload)


def _atomic_write(path, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        from ..errors import IoFailure

        raise IoFailure(f"cannot write {path}: {exc}") from exc

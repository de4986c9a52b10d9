"""Assemble sparse MILPs for the three fidelities.

Column space: one variable per (arc, commodity); window-closed arcs keep
their columns with an upper bound of zero. Row space: one mass-balance
inequality per (node, time, commodity) plus per-arc concurrency blocks.
All rows are <= rows; dumping surplus commodities is always allowed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import commodity as cm
from .commodity import (
    CAT_VEHICLE,
    CommoditySpace,
    ConcurrencyMatrix,
    TransformationMatrix,
)
from .errors import InvalidScenario, PlanModelMismatch, RatiosIncomplete, UnderdeterminedReference
from .network import TRANSPORT, Arc, TimeExpandedGraph

MASS_BALANCE = "mass-balance"
CONCURRENCY = "concurrency"


@dataclass(frozen=True)
class ColumnMeta:
    """Maps a model column back to (arc, commodity-or-package)."""

    arc_index: int
    commodity: str | None = None
    package: tuple[str, ...] | None = None

    @property
    def label(self) -> str:
        if self.package is not None:
            return "pkg[" + "+".join(self.package) + "]"
        return self.commodity or "?"


@dataclass(frozen=True)
class RowMeta:
    """Constraint family tag: mass-balance(node, t, commodity) or
    concurrency(arc, label)."""

    family: str
    node: str | None = None
    time_index: int | None = None
    commodity: str | None = None
    arc_index: int | None = None
    label: str | None = None
    members: tuple[str, ...] | None = None  # after aggregation

    def name(self) -> str:
        if self.family == MASS_BALANCE:
            com = self.commodity if self.members is None else "+".join(self.members)
            return f"mb.{self.node}.t{self.time_index}.{com}"
        return f"cc.a{self.arc_index}.{self.label}"


class MILPModel:
    """Sparse standard-form minimization model: min c x, A x <= b.

    Bounds default to [0, inf); integrality is a per-column flag. The
    constraint matrix is held in COO triplets with deterministic ordering.
    """

    def __init__(
        self,
        obj,
        a_rows,
        a_cols,
        a_vals,
        rhs,
        lb,
        ub,
        integer,
        col_meta,
        row_meta,
        provenance=None,
    ):
        self.obj = np.asarray(obj, dtype=float)
        self.a_rows = np.asarray(a_rows, dtype=np.int64)
        self.a_cols = np.asarray(a_cols, dtype=np.int64)
        self.a_vals = np.asarray(a_vals, dtype=float)
        self.rhs = np.asarray(rhs, dtype=float)
        self.lb = np.asarray(lb, dtype=float)
        self.ub = np.asarray(ub, dtype=float)
        self.integer = np.asarray(integer, dtype=bool)
        self.col_meta: list[ColumnMeta] = list(col_meta)
        self.row_meta: list[RowMeta] = list(row_meta)
        self.provenance = provenance or {}
        n = len(self.obj)
        m = len(self.rhs)
        if not (len(self.lb) == len(self.ub) == len(self.integer) == n):
            raise ValueError("column array lengths disagree")
        if len(self.col_meta) != n or len(self.row_meta) != m:
            raise ValueError("metadata lengths disagree")

    @property
    def n_cols(self) -> int:
        return len(self.obj)

    @property
    def n_rows(self) -> int:
        return len(self.rhs)

    def dense(self) -> np.ndarray:
        A = np.zeros((self.n_rows, self.n_cols))
        np.add.at(A, (self.a_rows, self.a_cols), self.a_vals)
        return A

    def col_name(self, j: int) -> str:
        names = self.provenance.get("explicit_names")
        if names is not None:
            return names[0][j]
        meta = self.col_meta[j]
        return f"x.a{meta.arc_index}.{meta.label}"

    def row_name(self, i: int) -> str:
        names = self.provenance.get("explicit_names")
        if names is not None:
            return names[1][i]
        return self.row_meta[i].name()


def model_stats(model: MILPModel) -> tuple[int, int, int, int]:
    """(rows, columns, integer columns, nonzeros) with exact counts."""
    nnz = int(np.count_nonzero(model.a_vals))
    return (model.n_rows, model.n_cols, int(model.integer.sum()), nnz)


@dataclass(frozen=True)
class PrefixedRatios:
    """Fixed subsystem mass fractions per infrastructure bundle."""

    bundles: tuple[tuple[str, tuple[tuple[str, float], ...]], ...]

    def __post_init__(self):
        for bundle_id, fractions in self.bundles:
            total = sum(f for _, f in fractions)
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"bundle {bundle_id}: fractions sum to {total}")
            if any(f < 0 for _, f in fractions):
                raise ValueError(f"bundle {bundle_id}: negative fraction")

    def fractions(self, bundle_id: str) -> dict[str, float]:
        for bid, fr in self.bundles:
            if bid == bundle_id:
                return dict(fr)
        raise KeyError(bundle_id)


@dataclass
class Solution:
    status: str  # optimal | infeasible | unbounded | limit
    objective: float | None
    values: np.ndarray | None
    bound: float | None = None  # best proven bound (branch and bound)
    iterations: int = 0
    nodes: int = 0
    wall_seconds: float = 0.0


class _Assembler:
    """Shared machinery behind the full-size and prefixed builders."""

    def __init__(self, scenario):
        self.scn = scenario
        self.graph: TimeExpandedGraph = scenario.expanded()
        self.space: CommoditySpace = scenario.space
        self.R = len(self.space)

    def arc_transformation(self, arc: Arc) -> TransformationMatrix:
        scn = self.scn
        key = arc.key()
        if arc.kind == TRANSPORT:
            vehicle = self.graph.vehicle(arc.vehicle)
            edge = self.graph.edge(arc.from_node, arc.to_node)
            return cm.burn_matrix(vehicle, edge.delta_v, self.space, key)
        # holdover: production at ISRU-capable nodes, maintenance wherever
        # maintained hardware can sit (everywhere but the supply node)
        step = self.graph.grid.step_days
        ops = scn.operations
        F = TransformationMatrix(key, np.eye(self.R))
        if arc.from_node in scn.isru_nodes:
            hours = {
                e.id: cm.operating_hours(
                    e.operating_hours_per_solar_day, step, ops.solar_day_hours
                )
                for e in scn.isru_catalog
            }
            F = cm.production_matrix(
                list(scn.isru_catalog),
                hours,
                self.space,
                key,
                productivity=scn.productivity,
            )
        if arc.from_node != ops.supply_node and ops.maintenance_rate > 0:
            F = cm.apply_maintenance(
                F,
                ops.maintenance_rate,
                step,
                self.space,
                ops.spare_commodity,
                categories=ops.maintenance_categories,
            )
        return F

    def _power_loads(self, node: str) -> list[cm.PowerLoad]:
        loads: list[cm.PowerLoad] = []
        if node in self.scn.isru_nodes:
            for e in self.scn.isru_catalog:
                if e.power_per_kg > 0 and e.id in self.space:
                    loads.append(
                        cm.PowerLoad(e.id, e.power_per_kg, e.operating_hours_per_solar_day)
                    )
        # tank cooling draws power for the tank as built, not per fill state
        for s in self.scn.storage_catalog:
            if s.specific_power > 0 and s.id in self.space:
                loads.append(
                    cm.PowerLoad(s.id, s.power_per_kg, s.operating_hours_per_solar_day)
                )
        return loads

    def arc_concurrency(self, arc: Arc, F: TransformationMatrix) -> ConcurrencyMatrix:
        scn = self.scn
        ops = scn.operations
        key = arc.key()
        blocks: list[ConcurrencyMatrix] = []
        if arc.kind == TRANSPORT:
            vehicle = self.graph.vehicle(arc.vehicle)
            blocks.append(cm.capacity_rows(vehicle, self.space, key))
        else:
            if arc.from_node != ops.supply_node:
                blocks.append(
                    cm.storage_capacity_rows(
                        list(scn.storage_catalog), self.space, inflow=F, arc_key=key
                    )
                )
                power = scn.power_entry()
                buffer = scn.energy_buffer_entry()
                if power is not None and power.id in self.space:
                    elapsed = self.graph.grid.day_of(arc.depart_step)
                    p0 = cm.degradation_schedule(power, elapsed, ops.solar_day_hours)
                    loads = self._power_loads(arc.from_node)
                    eps = buffer.efficiency if buffer is not None else 1.0
                    blocks.append(
                        cm.power_supply_row(
                            loads, power, eps, self.space, key, p0_effective=p0
                        )
                    )
                    if buffer is not None and buffer.id in self.space:
                        blocks.append(
                            cm.energy_storage_row(
                                loads, power, buffer, self.space, key, p0_effective=p0
                            )
                        )
        eye = np.eye(self.R)
        if not np.array_equal(F.F, eye):
            nn = cm.nonneg_inflow_rows(F, self.space)
            # identity rows of F reduce to x >= 0, already a bound
            keep = [i for i in range(self.R) if not np.array_equal(F.F[i], eye[i])]
            blocks.append(
                ConcurrencyMatrix(key, nn.H[keep, :], tuple(nn.labels[i] for i in keep))
            )
        if not blocks:
            return ConcurrencyMatrix(key, np.zeros((0, self.R)), ())
        H = np.vstack([b.H for b in blocks])
        labels = tuple(l for b in blocks for l in b.labels)
        return ConcurrencyMatrix(key, H, labels)

    def objective_row(self, arc: Arc) -> np.ndarray:
        """IMLEO: unit cost per massed kilogram leaving on the launch edge,
        structure mass per vehicle count; zero elsewhere."""
        c = np.zeros(self.R)
        launch_from, launch_to = self.scn.objective_launch_edge
        if (
            arc.kind == TRANSPORT
            and arc.from_node == launch_from
            and arc.to_node == launch_to
        ):
            for i in self.space.massed_indices():
                c[i] = 1.0
            vehicle = self.graph.vehicle(arc.vehicle)
            c[self.space.index(vehicle.id)] = vehicle.structure_mass
        return c

    def assemble(self, fidelity: str) -> MILPModel:
        graph, space, R = self.graph, self.space, self.R
        scn = self.scn
        grid = graph.grid
        node_ids = graph.node_ids()
        node_pos = {n: i for i, n in enumerate(node_ids)}
        n_times = grid.n_steps

        # mass-balance row index for (node, t, commodity)
        def mb_row(node: str, t: int, k: int) -> int:
            return (node_pos[node] * n_times + t) * R + k

        n_mb = len(node_ids) * n_times * R
        row_meta: list[RowMeta] = [
            RowMeta(MASS_BALANCE, node=n, time_index=t, commodity=space.commodities[k].id)
            for n in node_ids
            for t in range(n_times)
            for k in range(R)
        ]
        rhs: list[float] = [
            scn.demands.amount(n, grid.day_of(t), space.commodities[k].id)
            for n in node_ids
            for t in range(n_times)
            for k in range(R)
        ]

        obj: list[float] = []
        lb: list[float] = []
        ub: list[float] = []
        integer: list[bool] = []
        col_meta: list[ColumnMeta] = []
        a_rows: list[int] = []
        a_cols: list[int] = []
        a_vals: list[float] = []

        next_row = n_mb
        for a_idx, arc in enumerate(graph.arcs):
            F = self.arc_transformation(arc)
            cost = self.objective_row(arc)
            base_col = len(obj)
            for k, com in enumerate(space.commodities):
                j = base_col + k
                closed = arc.kind == TRANSPORT and not arc.window_open
                foreign_vehicle = (
                    arc.kind == TRANSPORT
                    and com.category == CAT_VEHICLE
                    and com.id != arc.vehicle
                )
                obj.append(float(cost[k]))
                lb.append(0.0)
                ub.append(0.0 if (closed or foreign_vehicle) else np.inf)
                integer.append(com.kind == cm.DISCRETE)
                col_meta.append(ColumnMeta(a_idx, commodity=com.id))
                # outflow into the departure node's balance
                a_rows.append(mb_row(arc.from_node, arc.depart_step, k))
                a_cols.append(j)
                a_vals.append(1.0)
            # transformed inflow into the arrival node's balance
            Fr, Fc = np.nonzero(F.F)
            for r, c_ in zip(Fr, Fc):
                a_rows.append(mb_row(arc.to_node, arc.arrive_step, int(r)))
                a_cols.append(base_col + int(c_))
                a_vals.append(-float(F.F[r, c_]))
            # concurrency rows (skipped for window-closed arcs: zero flow)
            if arc.kind == TRANSPORT and not arc.window_open:
                continue
            H = self.arc_concurrency(arc, F)
            Hr, Hc = np.nonzero(H.H)
            for r, c_ in zip(Hr, Hc):
                a_rows.append(next_row + int(r))
                a_cols.append(base_col + int(c_))
                a_vals.append(float(H.H[r, c_]))
            for label in H.labels:
                row_meta.append(RowMeta(CONCURRENCY, arc_index=a_idx, label=label))
                rhs.append(0.0)
            next_row += H.n_rows

        model = MILPModel(
            obj,
            a_rows,
            a_cols,
            a_vals,
            rhs,
            lb,
            ub,
            integer,
            col_meta,
            row_meta,
            provenance={
                "fidelity": fidelity,
                "scenario": scn,
                "graph": graph,
                "space": space,
            },
        )
        return model


def build_full_size(scenario) -> MILPModel:
    """Full-size model: every subsystem is its own commodity everywhere."""
    _validate_for_build(scenario)
    asm = _Assembler(scenario)
    model = asm.assemble("full-size")
    model.provenance["rebuild"] = lambda: _Assembler(scenario).assemble("full-size")
    return model


def _validate_for_build(scenario):
    problems = []
    space = scenario.space
    grid_days = set(scenario.grid.steps)
    for e in scenario.demands:
        if e.commodity not in space:
            problems.append(f"demand references unknown commodity {e.commodity!r}")
        if float(e.time_days) not in grid_days:
            problems.append(f"demand at t={e.time_days} is off-grid")
    for v in scenario.vehicles:
        if v.id not in space:
            problems.append(f"vehicle {v.id!r} has no commodity")
        for cid, _ in v.propellant_components:
            if cid not in space:
                problems.append(f"vehicle {v.id} component {cid!r} unknown")
    if problems:
        raise InvalidScenario("; ".join(problems))


def derive_prefixed_ratios(scenario) -> PrefixedRatios:
    """Size the bundle subsystems at a reference production rate.

    Reactors/excavators are sized by walking the production chain
    backwards from the reference product; tanks hold the net production of
    one storage interval; power covers peak demand (full tanks) and the
    energy buffer absorbs the worst generation surplus (empty tanks).
    Masses are normalized to fractions.
    """
    cfg = scenario.prefixed_config
    if cfg is None or not cfg.reference_chain:
        raise UnderdeterminedReference("no reference production chain configured")
    entries = {e.id: e for e in scenario.isru_catalog}
    storage = {s.id: s for s in scenario.storage_catalog}
    members = list(cfg.members)
    step = scenario.grid.step_days
    ops = scenario.operations
    storage_days = cfg.storage_days or ops.launch_interval_days

    required: dict[str, float] = {cfg.reference_product: cfg.reference_rate}
    plant_mass: dict[str, float] = {}
    for entry_id in cfg.reference_chain:
        if entry_id not in entries:
            raise UnderdeterminedReference(f"chain entry {entry_id!r} not in catalog")
        e = entries[entry_id]
        rate = required.get(e.reference_product, 0.0)
        if rate <= 0:
            continue
        mass = rate * e.specific_mass / scenario.productivity
        plant_mass[entry_id] = plant_mass.get(entry_id, 0.0) + mass
        for cid, ratio in e.inputs:
            required[cid] = required.get(cid, 0.0) + ratio * rate
        for cid, ratio in e.outputs:
            if cid != e.reference_product:
                required[cid] = required.get(cid, 0.0) - ratio * rate

    # net production rate (kg/hr) of every commodity across the sized chain
    net_rate: dict[str, float] = {}
    for entry_id, mass in plant_mass.items():
        e = entries[entry_id]
        for cid, _ in e.outputs:
            net_rate[cid] = net_rate.get(cid, 0.0) + e.alpha(cid) * scenario.productivity * mass
        for cid, _ in e.inputs:
            net_rate[cid] = net_rate.get(cid, 0.0) - e.beta(cid) * scenario.productivity * mass

    tank_mass: dict[str, float] = {}
    held: dict[str, float] = {}
    for tank_id in members:
        if tank_id not in storage:
            continue
        s = storage[tank_id]
        rate = max(0.0, net_rate.get(s.stores, 0.0))
        hours = cm.operating_hours(708.0, storage_days, ops.solar_day_hours)
        for entry_id in plant_mass:
            e = entries[entry_id]
            if e.alpha(s.stores) > 0:
                hours = cm.operating_hours(
                    e.operating_hours_per_solar_day, storage_days, ops.solar_day_hours
                )
                break
        amount = rate * hours
        held[s.stores] = amount
        tank_mass[tank_id] = amount * s.specific_mass * cfg.storage_scale

    power = scenario.power_entry()
    buffer = scenario.energy_buffer_entry()
    eps = buffer.efficiency if buffer is not None else 1.0
    power_mass = 0.0
    buffer_mass = 0.0
    if power is not None and power.id in members:
        q_p = power.working_hours_per_solar_day
        demand = 0.0
        for entry_id, mass in plant_mass.items():
            e = entries[entry_id]
            q_i = e.operating_hours_per_solar_day
            demand += mass * e.power_per_kg * (1.0 + (q_i - q_p) / (eps * q_p))
        for tank_id, t_mass in tank_mass.items():
            s = storage[tank_id]
            q_i = s.operating_hours_per_solar_day
            demand += t_mass * s.power_per_kg * (1.0 + (q_i - q_p) / (eps * q_p))
        power_mass = demand / power.specific_output
        if buffer is not None and buffer.id in members:
            # buffer absorbs the generation surplus over the nominal draw
            draw = sum(entries[eid].power_per_kg * m for eid, m in plant_mass.items())
            draw += sum(
                storage[tid].power_per_kg * m for tid, m in tank_mass.items()
            )
            surplus = max(0.0, power.specific_output * power_mass - draw)
            buffer_mass = surplus * eps * q_p / buffer.specific_energy

    masses: dict[str, float] = {}
    for entry_id, m in plant_mass.items():
        if entry_id in members:
            masses[entry_id] = m
    masses.update({t: m for t, m in tank_mass.items()})
    if power is not None and power.id in members:
        masses[power.id] = power_mass
    if buffer is not None and buffer.id in members and buffer_mass > 0:
        masses[buffer.id] = buffer_mass
    for m_id in members:
        masses.setdefault(m_id, 0.0)
    total = sum(masses.values())
    if total <= 0:
        raise UnderdeterminedReference("reference sizing produced zero bundle mass")
    fractions = tuple(sorted((k, v / total) for k, v in masses.items()))
    return PrefixedRatios(bundles=((cfg.bundle_id, fractions),))


def build_prefixed(scenario, ratios: PrefixedRatios) -> MILPModel:
    """Prefixed model: bundle subsystems collapse into one commodity whose
    coefficients are the ratio-weighted blend of its members."""
    cfg = scenario.prefixed_config
    if cfg is None:
        raise RatiosIncomplete("scenario has no prefixed bundle configured")
    try:
        fractions = ratios.fractions(cfg.bundle_id)
    except KeyError:
        raise RatiosIncomplete(f"ratios missing bundle {cfg.bundle_id!r}") from None
    missing = [m for m in cfg.members if m not in fractions]
    if missing:
        raise RatiosIncomplete(f"ratios missing members {missing}")
    scn_pf = scenario.with_prefixed_bundle(fractions)
    asm = _Assembler(scn_pf)
    model = asm.assemble("prefixed")
    model.provenance["rebuild"] = lambda: _Assembler(scn_pf).assemble("prefixed")
    model.provenance["ratios"] = ratios
    return model


def build_multifidelity(scenario, plan) -> MILPModel:
    """Multi-fidelity model: full-size transformed by the packing plan."""
    from . import packing

    full = build_full_size(scenario)
    if plan.is_empty():
        return full
    if plan.n_commodities != len(scenario.space):
        raise PlanModelMismatch(
            f"plan built for R={plan.n_commodities}, scenario has R={len(scenario.space)}"
        )
    model = packing.apply_plan(full, plan)
    model.provenance["rebuild"] = lambda: packing.apply_plan(build_full_size(scenario), plan)
    return model

"""Bundled multi-mission lunar exploration case study.

Five-node cislunar network (Earth, LEO, GEO, EML1, Moon), two spacecraft,
water-electrolysis ISRU catalog, FSPS surface power, annual crew missions:
30,000 kg of crew cabin and equipment to the Moon on day 240 of each
360-day mission year, 5,000 kg of cabin and samples back to Earth on day
360. Earth supplies propellant, water, spares, hardware and vehicles at
every step, capped by a large constant standing in for "unlimited".

Velocity changes and flight times are scenario data transcribed by the
implementer; flight times are all shorter than the launch interval, so
transport arcs arrive within their departure step. Earth launch slots sit
at launch-interval multiples (plus crew mission epochs), skipping
year-end days: the day-360 return windows are for in-space legs only.
"""

from __future__ import annotations

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
from ..errors import UnknownVariant
from ..network import NodeSpec, TransportEdge, VehicleSpec, build_time_grid
from .schema import FidelityConfig, OperationsConfig, PrefixedConfig, ScenarioFile

YEAR_DAYS = 360.0  # mission-year length: three 120-day operation intervals
OUTBOUND_PAYLOAD = 30_000.0
RETURN_PAYLOAD = 5_000.0
SUPPLY_CAP = 1e9
VEHICLE_SUPPLY = 1_000.0

#: directed cislunar edges: (from, to, delta-v km/s, time of flight days)
EDGES = (
    ("earth", "leo", 0.0, 0.25),
    ("leo", "earth", 0.0, 0.25),
    ("leo", "geo", 3.85, 0.21),
    ("geo", "leo", 1.85, 0.21),
    ("leo", "eml1", 3.77, 7.0),
    ("eml1", "leo", 0.77, 7.0),
    ("geo", "eml1", 1.38, 5.0),
    ("eml1", "geo", 1.38, 5.0),
    ("eml1", "moon", 2.53, 3.0),
    ("moon", "eml1", 2.53, 3.0),
)

ALLOWED_INTERVALS = (60.0, 120.0, 240.0)


def bundled_lunar_scenario(
    missions: int = 3,
    launch_interval: float = 120.0,
    isru_productivity: float = 1.0,
    storage_scale: float = 1.0,
    reduced: bool = False,
) -> ScenarioFile:
    """Build the case-study scenario for a variant.

    ``reduced`` shrinks the instance to reference-solver scale: GEO and its
    edges are dropped (it only adds alternate routings), the methane-fueled
    lander and its commodities go with it, and the molten-regolith reactor
    leaves the catalog. Demands, operating assumptions, the launch edge and
    the ISRU trade are unchanged.
    """
    if not isinstance(missions, int) or missions < 1:
        raise UnknownVariant(f"missions must be a positive integer, got {missions!r}")
    if float(launch_interval) not in ALLOWED_INTERVALS:
        raise UnknownVariant(
            f"launch_interval must be one of {ALLOWED_INTERVALS}, got {launch_interval!r}"
        )
    if not (isru_productivity > 0):
        raise UnknownVariant(f"isru_productivity must be > 0, got {isru_productivity!r}")
    if not (0.0 <= storage_scale <= 1.0):
        raise UnknownVariant(f"storage_scale must lie in [0, 1], got {storage_scale!r}")

    interval = float(launch_interval)
    step = min(120.0, interval)
    horizon = YEAR_DAYS * missions
    grid = build_time_grid(horizon, step)

    nodes = [
        NodeSpec("earth", "surface"),
        NodeSpec("leo", "orbit"),
        NodeSpec("geo", "orbit"),
        NodeSpec("eml1", "lagrange-point"),
        NodeSpec("moon", "surface"),
    ]
    if reduced:
        nodes = [n for n in nodes if n.id != "geo"]
    node_ids = {n.id for n in nodes}

    mission_epochs = [YEAR_DAYS * y + 240.0 for y in range(missions)]
    return_epochs = [YEAR_DAYS * y + 360.0 for y in range(missions)]
    launch_days = sorted(
        {
            k * interval
            for k in range(1, int(horizon / interval) + 1)
            if (k * interval) % YEAR_DAYS != 0.0
        }
        | set(mission_epochs)
    )
    launch_windows = tuple((d, d) for d in launch_days)
    flight_window = ((interval, horizon),)

    edges = tuple(
        TransportEdge(
            a,
            b,
            dv,
            tof,
            windows=launch_windows if (a, b) == ("earth", "leo") else flight_window,
        )
        for a, b, dv, tof in EDGES
        if a in node_ids and b in node_ids
    )

    vehicles = [
        VehicleSpec(
            "sc_1",
            structure_mass=5_917.0,
            propellant_capacity=68_040.0,
            payload_capacity=45_000.0,
            isp=420.0,
            propellant_components=(("o2", 5.5 / 6.5), ("h2", 1.0 / 6.5)),
        ),
        VehicleSpec(
            "sc_2",
            structure_mass=6_560.0,
            propellant_capacity=40_737.0,
            payload_capacity=20_000.0,
            isp=350.0,
            propellant_components=(("o2", 3.5 / 4.5), ("ch4", 1.0 / 4.5)),
        ),
    ]
    if reduced:
        vehicles = vehicles[:1]

    def C(cid, category, kind=cm.CONTINUOUS, unit="kg"):
        return Commodity(cid, kind, unit, category)

    commodities = [
        C("payload", cm.CAT_PAYLOAD),
        C("o2", cm.CAT_PROPELLANT),
        C("h2", cm.CAT_PROPELLANT),
        C("h2o", cm.CAT_RESOURCE),
        C("soil", cm.CAT_RESOURCE),
        C("spares", cm.CAT_SPARE),
        C("reactor_swe", cm.CAT_INFRA),
        C("reactor_dwe", cm.CAT_INFRA),
        C("excavator", cm.CAT_INFRA),
        C("tank_o2", cm.CAT_INFRA),
        C("tank_h2", cm.CAT_INFRA),
        C("tank_h2o", cm.CAT_INFRA),
        C("fsps", cm.CAT_POWER),
        C("battery", cm.CAT_ENERGY),
        C("sc_1", cm.CAT_VEHICLE, cm.DISCRETE, "count"),
    ]
    if not reduced:
        commodities.insert(3, C("ch4", cm.CAT_PROPELLANT))
        commodities.insert(8, C("reactor_mre", cm.CAT_INFRA))
        commodities.insert(13, C("tank_ch4", cm.CAT_INFRA))
        commodities.append(C("sc_2", cm.CAT_VEHICLE, cm.DISCRETE, "count"))
    space = CommoditySpace(commodities)

    # soil @3% water: 33.33 kg of regolith per kg of extracted water;
    # electrolysis stoichiometry 2 H2O -> 2 H2 + O2 per kg of O2
    isru = [
        IsruCatalogEntry(
            id="reactor_swe",
            reference_product="h2o",
            specific_mass=357.0,
            specific_power=13.7,
            outputs=(("h2o", 1.0),),
            inputs=(("soil", 1.0 / 0.03),),
        ),
        IsruCatalogEntry(
            id="reactor_dwe",
            reference_product="o2",
            specific_mass=83.3,
            specific_power=5.83,
            outputs=(("h2", 4.0 / 32.0), ("o2", 1.0)),
            inputs=(("h2o", 36.0 / 32.0),),
        ),
        IsruCatalogEntry(
            id="excavator",
            reference_product="soil",
            specific_mass=0.38,
            specific_power=0.004,
            outputs=(("soil", 1.0),),
        ),
    ]
    if not reduced:
        # molten regolith electrolysis: oxygen straight from soil at an
        # assumed 40% extractable-oxygen yield
        isru.append(
            IsruCatalogEntry(
                id="reactor_mre",
                reference_product="o2",
                specific_mass=197.58,
                specific_power=26.94,
                outputs=(("o2", 1.0),),
                inputs=(("soil", 2.5),),
            )
        )

    storage = [
        StorageCatalogEntry("tank_o2", "o2", specific_mass=5.15, specific_power=0.0088),
        StorageCatalogEntry("tank_h2", "h2", specific_mass=3.33, specific_power=0.0267),
        StorageCatalogEntry("tank_h2o", "h2o", specific_mass=40.0, specific_power=0.0),
    ]
    if not reduced:
        storage.append(
            StorageCatalogEntry("tank_ch4", "ch4", specific_mass=1.67, specific_power=0.0073)
        )

    power = (
        PowerCatalogEntry(
            id="fsps",
            kind="FSPS",
            specific_output=1.0 / 150.0,
            working_hours_per_solar_day=708.0,
        ),
    )
    energy = (EnergyStorageEntry("battery", specific_energy=0.25, efficiency=0.95),)

    always_supplied = [
        "o2",
        "h2",
        "h2o",
        "spares",
        "reactor_swe",
        "reactor_dwe",
        "excavator",
        "tank_o2",
        "tank_h2",
        "tank_h2o",
        "fsps",
        "battery",
    ]
    if not reduced:
        always_supplied += ["ch4", "reactor_mre", "tank_ch4"]

    entries = []
    for day in grid.steps:
        for cid in always_supplied:
            entries.append(DemandEntry("earth", day, cid, SUPPLY_CAP))
        for v in vehicles:
            entries.append(DemandEntry("earth", day, v.id, VEHICLE_SUPPLY))
    for epoch in mission_epochs:
        entries.append(DemandEntry("earth", epoch, "payload", OUTBOUND_PAYLOAD))
        entries.append(DemandEntry("moon", epoch, "payload", -OUTBOUND_PAYLOAD))
    for epoch in return_epochs:
        entries.append(DemandEntry("moon", epoch, "payload", RETURN_PAYLOAD))
        entries.append(DemandEntry("earth", epoch, "payload", -RETURN_PAYLOAD))

    members = [
        "reactor_swe",
        "reactor_dwe",
        "excavator",
        "tank_o2",
        "tank_h2",
        "tank_h2o",
        "fsps",
        "battery",
    ]
    fidelity = FidelityConfig(
        packing_n=None,
        pack_idle_holdover=False,
        prefixed=PrefixedConfig(
            bundle_id="isru_plant",
            members=tuple(members),
            reference_product="o2",
            reference_chain=("reactor_dwe", "reactor_swe", "excavator"),
            reference_rate=1.0,
            storage_days=None,
            storage_scale=storage_scale,
        ),
    )

    variant = f"m{missions}-i{int(interval)}-p{int(isru_productivity * 100)}"
    if storage_scale != 1.0:
        variant += f"-s{int(storage_scale * 100)}"
    if reduced:
        variant += "-reduced"
    return ScenarioFile(
        name=f"lunar_campaign[{variant}]",
        description="Multi-mission human lunar exploration with water ISRU",
        grid=grid,
        nodes=nodes,
        edges=edges,
        vehicles=vehicles,
        space=space,
        isru_nodes=("moon",),
        isru_catalog=tuple(isru),
        storage_catalog=tuple(storage),
        power_catalog=power,
        energy_storage_catalog=energy,
        demands=DemandSchedule(entries),
        operations=OperationsConfig(
            launch_interval_days=interval,
            supply_node="earth",
            maintenance_rate=0.10,
            spare_commodity="spares",
            solar_day_hours=708.0,
            power_system="fsps",
            energy_buffer="battery",
            supply_cap=SUPPLY_CAP,
        ),
        objective_launch_edge=("earth", "leo"),
        fidelity=fidelity,
        productivity=isru_productivity,
    )

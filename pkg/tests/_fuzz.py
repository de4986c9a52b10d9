"""Shared randomized-instance generators for the test suite."""

from __future__ import annotations

import numpy as np

from spacelog import commodity as cm
from spacelog.commodity import (
    Commodity,
    CommoditySpace,
    DemandEntry,
    DemandSchedule,
    IsruCatalogEntry,
    StorageCatalogEntry,
)
from spacelog.formulation import ColumnMeta, MILPModel, RowMeta
from spacelog.network import NodeSpec, TransportEdge, VehicleSpec, build_time_grid
from spacelog.scenario_cli.schema import (
    FidelityConfig,
    OperationsConfig,
    PrefixedConfig,
    ScenarioFile,
)


def random_model(rng, n_max=8, m_max=6, int_max=3, ub_hi=4.0) -> MILPModel:
    """Random bounded MILP in model form (all columns capped for finite
    enumeration)."""
    n = int(rng.integers(2, n_max + 1))
    m = int(rng.integers(1, m_max + 1))
    A = np.round(rng.normal(size=(m, n)) * rng.integers(0, 2, size=(m, n)), 3)
    b = np.round(rng.normal(size=m) * 2 + 1, 3)
    c = np.round(rng.normal(size=n), 3)
    integer = rng.random(n) < 0.4
    while integer.sum() > int_max:
        integer[int(rng.integers(0, n))] = False
    ub = rng.uniform(1, ub_hi, n).round(2)
    rr, cc = np.nonzero(A)
    return MILPModel(
        c,
        rr,
        cc,
        A[rr, cc],
        b,
        np.zeros(n),
        ub,
        integer,
        [ColumnMeta(0, commodity=f"c{j}") for j in range(n)],
        [RowMeta("concurrency", arc_index=0, label=f"r{i}") for i in range(m)],
    )


def random_feasible_lp(rng, n_max=8, m_max=6):
    """Random LP with a known feasible point and nonnegative costs (bounded)."""
    n = int(rng.integers(2, n_max + 1))
    m = int(rng.integers(2, m_max + 1))
    A = np.round(rng.normal(size=(m, n)), 3)
    x0 = np.abs(np.round(rng.normal(size=n), 3))
    b = A @ x0 + np.abs(rng.normal(size=m)) * 0.1
    # a few forcing rows so the optimum is off the origin
    k = int(rng.integers(1, m + 1))
    for i in range(k):
        row = -np.abs(np.round(rng.normal(size=n), 3)) - 0.05
        A[i] = row
        b[i] = row @ x0 * rng.uniform(0.2, 0.9)
    c = np.abs(np.round(rng.normal(size=n), 3))
    return c, A, b


def random_scenario(rng) -> ScenarioFile:
    """Random desk-scale campaign: <= 4 nodes, <= 6 time points, <= 6
    commodities with <= 2 discrete, one infrastructure bundle so that all
    three fidelities can be built."""
    n_nodes = int(rng.integers(2, 5))
    nodes = [NodeSpec(f"n{i}") for i in range(n_nodes)]
    n_steps = int(rng.integers(2, 7))  # time points
    step = float(rng.choice([30.0, 60.0, 120.0]))
    grid = build_time_grid(step * (n_steps - 1), step)

    n_vehicles = 1 if n_nodes <= 3 or rng.random() < 0.6 else 2
    commodities = [
        Commodity("pay", cm.CONTINUOUS, "kg", cm.CAT_PAYLOAD),
        Commodity("prop", cm.CONTINUOUS, "kg", cm.CAT_PROPELLANT),
        Commodity("plant", cm.CONTINUOUS, "kg", cm.CAT_INFRA),
        Commodity("tank", cm.CONTINUOUS, "kg", cm.CAT_INFRA),
    ]
    for v in range(n_vehicles):
        commodities.append(Commodity(f"veh{v}", cm.DISCRETE, "count", cm.CAT_VEHICLE))
    space = CommoditySpace(commodities)

    vehicles = []
    for v in range(n_vehicles):
        vehicles.append(
            VehicleSpec(
                f"veh{v}",
                structure_mass=float(rng.uniform(0.5, 4.0)),
                propellant_capacity=float(rng.uniform(20, 120)),
                payload_capacity=float(rng.uniform(20, 120)),
                isp=float(rng.uniform(250, 450)),
                propellant_components=(("prop", 1.0),),
            )
        )

    # a connected chain plus a few random extra edges, both directions
    pairs = {(i, i + 1) for i in range(n_nodes - 1)}
    for _ in range(rng.integers(0, n_nodes)):
        i, j = rng.integers(0, n_nodes, size=2)
        if i != j:
            pairs.add((min(i, j), max(i, j)))
    edges = []
    for i, j in sorted(pairs):
        dv_out = float(rng.uniform(0, 3.0)) if (i, j) != (0, 1) else 0.0
        dv_back = float(rng.uniform(0, 3.0)) if (i, j) != (0, 1) else 0.0
        windows = None
        if rng.random() < 0.3:
            open_from = float(rng.choice(grid.steps))
            windows = ((open_from, grid.horizon_days),)
        edges.append(TransportEdge(f"n{i}", f"n{j}", dv_out, step * 0.1, windows))
        edges.append(TransportEdge(f"n{j}", f"n{i}", dv_back, step * 0.1, windows))

    isru_node = f"n{n_nodes - 1}"
    plant_rate = float(rng.uniform(0.001, 0.02))  # kg/hr of prop per kg plant
    isru = (
        IsruCatalogEntry(
            id="plant",
            reference_product="prop",
            specific_mass=1.0 / plant_rate,
            specific_power=0.0,
            outputs=(("prop", 1.0),),
        ),
    )
    storage = (
        StorageCatalogEntry(
            "tank", "prop", specific_mass=float(rng.uniform(0.5, 4.0))
        ),
    )

    amount = float(rng.uniform(2, 30))
    t_supply = float(rng.choice(grid.steps[: max(1, n_steps - 1)]))
    t_demand = float(
        rng.choice([t for t in grid.steps if t >= t_supply]) if n_steps > 1 else 0.0
    )
    dest = f"n{int(rng.integers(1, n_nodes))}" if n_nodes > 1 else "n0"
    entries = [DemandEntry("n0", t_supply, "pay", amount)]
    entries.append(DemandEntry(dest, t_demand, "pay", -amount * rng.uniform(0.5, 1.0)))
    for day in grid.steps:
        for cid in ("prop", "plant", "tank"):
            entries.append(DemandEntry("n0", day, cid, 1e6))
        for v in range(n_vehicles):
            entries.append(DemandEntry("n0", day, f"veh{v}", 50.0))

    fidelity = FidelityConfig(
        packing_n=None,
        prefixed=PrefixedConfig(
            bundle_id="bundle",
            members=("plant", "tank"),
            reference_product="prop",
            reference_chain=("plant",),
            reference_rate=1.0,
            storage_days=step,
            storage_scale=1.0,
        ),
    )
    return ScenarioFile(
        name=f"fuzz-{rng.integers(1_000_000)}",
        grid=grid,
        nodes=tuple(nodes),
        edges=tuple(edges),
        vehicles=tuple(vehicles),
        space=space,
        demands=DemandSchedule(entries),
        operations=OperationsConfig(
            launch_interval_days=step,
            supply_node="n0",
            maintenance_rate=0.0,
        ),
        objective_launch_edge=("n0", "n1") if n_nodes > 1 else ("n0", "n0"),
        isru_nodes=(isru_node,) if rng.random() < 0.7 else (),
        isru_catalog=isru,
        storage_catalog=storage,
        fidelity=fidelity,
    )

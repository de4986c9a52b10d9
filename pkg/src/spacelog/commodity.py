"""Commodity space and every coefficient block of the flow model.

This module owns the rocket-equation propellant fraction, burn and
production transformation matrices, capacity / power / energy-storage /
non-negativity concurrency rows, maintenance consumption and power
degradation. Identical physics always comes from the same constructor so
coefficient equality (which the packing preprocessor relies on) is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    MissingCommodity,
    NegativeDuration,
    NonPositiveIsp,
    ZeroPowerWorkingTime,
)
from .network import VehicleSpec

G0 = 9.80665  # m/s^2
DAYS_PER_YEAR = 365.0
HOURS_PER_DAY = 24.0

CONTINUOUS = "continuous"
DISCRETE = "discrete"

CAT_PAYLOAD = "payload"
CAT_PROPELLANT = "propellant-component"
CAT_RESOURCE = "resource"
CAT_VEHICLE = "vehicle"
CAT_INFRA = "infrastructure-subsystem"
CAT_POWER = "power"
CAT_ENERGY = "energy-storage"
CAT_SPARE = "spare"

#: categories whose unit is kilograms (everything except vehicle counts)
MASSED_CATEGORIES = frozenset(
    {CAT_PAYLOAD, CAT_PROPELLANT, CAT_RESOURCE, CAT_INFRA, CAT_POWER, CAT_ENERGY, CAT_SPARE}
)


@dataclass(frozen=True)
class Commodity:
    id: str
    kind: str  # continuous | discrete
    unit: str  # kg | count
    category: str

    def __post_init__(self):
        if self.category == CAT_VEHICLE and self.kind != DISCRETE:
            raise ValueError(f"vehicle commodity {self.id} must be discrete")
        if self.category in MASSED_CATEGORIES and self.kind != CONTINUOUS:
            raise ValueError(f"mass-valued commodity {self.id} must be continuous")


class CommoditySpace:
    """Ordered commodity list; R = len(space). Index lookups are O(1)."""

    def __init__(self, commodities):
        self.commodities: tuple[Commodity, ...] = tuple(commodities)
        ids = [c.id for c in self.commodities]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate commodity ids: {ids}")
        self._index = {c.id: i for i, c in enumerate(self.commodities)}

    def __len__(self):
        return len(self.commodities)

    def __iter__(self):
        return iter(self.commodities)

    def __contains__(self, cid):
        return cid in self._index

    def index(self, cid: str) -> int:
        try:
            return self._index[cid]
        except KeyError:
            raise MissingCommodity(f"commodity {cid!r} not in space") from None

    def get(self, cid: str) -> Commodity:
        return self.commodities[self.index(cid)]

    def ids(self) -> list[str]:
        return [c.id for c in self.commodities]

    def massed_indices(self) -> list[int]:
        return [i for i, c in enumerate(self.commodities) if c.category in MASSED_CATEGORIES]

    def discrete_indices(self) -> list[int]:
        return [i for i, c in enumerate(self.commodities) if c.kind == DISCRETE]

    def indices_of_category(self, category: str) -> list[int]:
        return [i for i, c in enumerate(self.commodities) if c.category == category]


@dataclass(frozen=True)
class TransformationMatrix:
    """Dense R x R transformation F for one arc; inflow = F @ outflow."""

    arc_key: tuple
    F: np.ndarray

    def __post_init__(self):
        if self.F.ndim != 2 or self.F.shape[0] != self.F.shape[1]:
            raise ValueError(f"F must be square, got {self.F.shape}")


@dataclass(frozen=True)
class ConcurrencyMatrix:
    """l x R concurrency block for one arc; every row is H x <= 0."""

    arc_key: tuple
    H: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        if self.H.shape[0] != len(self.labels):
            raise ValueError("one label per row required")

    @property
    def n_rows(self) -> int:
        return self.H.shape[0]


@dataclass(frozen=True)
class DemandEntry:
    node: str
    time_days: float
    commodity: str
    amount: float  # supplies positive, demands negative


class DemandSchedule:
    """Signed supply/demand entries keyed by (node, time, commodity)."""

    def __init__(self, entries):
        self.entries: tuple[DemandEntry, ...] = tuple(entries)
        self._by_key: dict[tuple[str, float, str], float] = {}
        for e in self.entries:
            k = (e.node, float(e.time_days), e.commodity)
            self._by_key[k] = self._by_key.get(k, 0.0) + e.amount

    def amount(self, node: str, time_days: float, commodity: str) -> float:
        return self._by_key.get((node, float(time_days), commodity), 0.0)

    def __iter__(self):
        return iter(self.entries)


@dataclass(frozen=True)
class IsruCatalogEntry:
    """One reactor/excavator model from the infrastructure catalog.

    ``specific_mass`` is kg of plant per (kg/hr of reference product) and
    ``specific_power`` is kW per (kg/hr of reference product). ``outputs``
    and ``inputs`` are mass ratios relative to one unit of reference
    product; per-kg-plant rates follow as ratio / specific_mass.
    """

    id: str  # plant commodity id
    reference_product: str
    specific_mass: float
    specific_power: float
    outputs: tuple[tuple[str, float], ...]
    inputs: tuple[tuple[str, float], ...] = ()
    operating_hours_per_solar_day: float = 708.0  # Q_I

    def __post_init__(self):
        if self.specific_mass <= 0:
            raise ValueError(f"{self.id}: specific_mass must be > 0")
        for cid, r in self.outputs + self.inputs:
            if r < 0:
                raise ValueError(f"{self.id}: negative coefficient for {cid}")

    def alpha(self, commodity: str) -> float:
        """Production rate, kg/hr per kg of plant."""
        for cid, ratio in self.outputs:
            if cid == commodity:
                return ratio / self.specific_mass
        return 0.0

    def beta(self, commodity: str) -> float:
        """Consumption rate, kg/hr per kg of plant."""
        for cid, ratio in self.inputs:
            if cid == commodity:
                return ratio / self.specific_mass
        return 0.0

    @property
    def power_per_kg(self) -> float:
        """Nominal power demand, kW per kg of plant."""
        return self.specific_power / self.specific_mass

    def stoichiometry_ok(self) -> bool:
        """Mass balance: total output rate cannot exceed total input rate.

        Entries without inputs draw from the environment (e.g. excavators)
        and are exempt.
        """
        if not self.inputs:
            return True
        total_alpha = sum(r for _, r in self.outputs)
        total_beta = sum(r for _, r in self.inputs)
        return total_alpha <= total_beta + 1e-12


@dataclass(frozen=True)
class StorageCatalogEntry:
    """Tank system sizing: kg of tank per kg of stored resource."""

    id: str  # tank commodity id
    stores: str  # resource/propellant commodity id
    specific_mass: float  # kg tank per kg stored
    specific_power: float = 0.0  # kW per kg stored
    operating_hours_per_solar_day: float = 708.0

    def __post_init__(self):
        if self.specific_mass <= 0:
            raise ValueError(f"{self.id}: specific_mass must be > 0")

    @property
    def capacity_per_kg(self) -> float:
        """kg of resource stored per kg of tank."""
        return 1.0 / self.specific_mass

    @property
    def power_per_kg(self) -> float:
        """kW per kg of tank."""
        return self.specific_power / self.specific_mass


@dataclass(frozen=True)
class PowerCatalogEntry:
    id: str  # power-system commodity id
    kind: str  # PV | FSPS | RPS
    specific_output: float  # P_0, kW per kg
    working_hours_per_solar_day: float  # Q_p
    degradation_rate: float = 0.0  # per period
    degradation_period: str = "year"  # year | sol

    def __post_init__(self):
        if self.specific_output <= 0:
            raise ValueError(f"{self.id}: P_0 must be > 0")
        if self.working_hours_per_solar_day < 0:
            raise ValueError(f"{self.id}: Q_p must be >= 0")


@dataclass(frozen=True)
class EnergyStorageEntry:
    id: str  # energy-storage commodity id
    specific_energy: float  # gamma, kWh per kg
    efficiency: float  # epsilon, round trip

    def __post_init__(self):
        if self.specific_energy <= 0:
            raise ValueError(f"{self.id}: specific energy must be > 0")
        if not (0.0 < self.efficiency <= 1.0):
            raise ValueError(f"{self.id}: efficiency must be in (0, 1]")


@dataclass(frozen=True)
class PowerLoad:
    """A commodity drawing power: demand P_I (kW/kg) over Q_I hours/solar day."""

    commodity: str
    p_i: float
    q_i: float


def propellant_mass_fraction(delta_v: float, isp: float) -> float:
    """Rocket-equation propellant fraction phi = 1 - exp(-dV / (Isp g0)).

    ``delta_v`` in km/s, ``isp`` in seconds. Returns a value in [0, 1),
    strictly increasing in delta_v.
    """
    if isp <= 0:
        raise NonPositiveIsp(f"isp must be > 0, got {isp}")
    if delta_v < 0:
        raise ValueError(f"delta_v must be >= 0, got {delta_v}")
    return 1.0 - float(np.exp(-delta_v * 1000.0 / (isp * G0)))


def burn_matrix(
    vehicle: VehicleSpec,
    delta_v: float,
    space: CommoditySpace,
    arc_key: tuple = (),
) -> TransformationMatrix:
    """Impulsive burn transformation for one transport arc.

    Identity except the rows of the vehicle's propellant components: each
    component row consumes its mass-ratio share of phi times everything
    riding the arc (massed commodities at their flow value, vehicle counts
    at structure mass per unit).
    """
    phi = propellant_mass_fraction(delta_v, vehicle.isp)
    R = len(space)
    F = np.eye(R)
    if phi == 0.0:
        return TransformationMatrix(arc_key, F)
    massed = space.massed_indices()
    for comp_id, fraction in vehicle.propellant_components:
        row = space.index(comp_id)
        for col in massed:
            F[row, col] -= fraction * phi
        col = space.index(vehicle.id)
        F[row, col] -= fraction * phi * vehicle.structure_mass
    return TransformationMatrix(arc_key, F)


def production_matrix(
    entries,
    hours: float,
    space: CommoditySpace,
    arc_key: tuple = (),
    productivity: float = 1.0,
) -> TransformationMatrix:
    """Resource production over ``hours`` of operation on a holdover arc.

    Adds +alpha*hours on (output row, plant column) and -beta*hours on
    (input row, plant column) for every catalog entry; plant rows remain
    identity because the plant mass does not change while producing.
    ``hours`` may be a scalar applied to every entry or a mapping from
    entry id to its own operating hours.
    """
    def hours_of(entry_id: str) -> float:
        if isinstance(hours, dict):
            return hours.get(entry_id, 0.0)
        return hours

    if not isinstance(hours, dict) and hours < 0:
        raise NegativeDuration(f"hours must be >= 0, got {hours}")
    for entry in entries:
        if hours_of(entry.id) < 0:
            raise NegativeDuration(f"hours must be >= 0, got {hours_of(entry.id)}")
    R = len(space)
    F = np.eye(R)
    for entry in entries:
        h = hours_of(entry.id)
        col = space.index(entry.id)
        for cid, _ in entry.outputs:
            F[space.index(cid), col] += entry.alpha(cid) * productivity * h
        for cid, _ in entry.inputs:
            F[space.index(cid), col] -= entry.beta(cid) * productivity * h
    return TransformationMatrix(arc_key, F)


def capacity_rows(
    vehicle: VehicleSpec, space: CommoditySpace, arc_key: tuple = ()
) -> ConcurrencyMatrix:
    """Payload and propellant capacity rows for one transport arc.

    Commodities in the operating vehicle's propellant mix count against
    the propellant tank; every other massed commodity counts as payload.
    """
    R = len(space)
    H = np.zeros((2, R))
    component_ids = {cid for cid, _ in vehicle.propellant_components}
    for i in space.massed_indices():
        if space.commodities[i].id in component_ids:
            H[1, i] = 1.0
        else:
            H[0, i] = 1.0
    vcol = space.index(vehicle.id)
    H[0, vcol] = -vehicle.payload_capacity
    H[1, vcol] = -vehicle.propellant_capacity
    return ConcurrencyMatrix(arc_key, H, ("payload-capacity", "propellant-capacity"))


def power_supply_row(
    loads,
    power_entry: PowerCatalogEntry,
    storage_efficiency: float,
    space: CommoditySpace,
    arc_key: tuple = (),
    p0_effective: float | None = None,
) -> ConcurrencyMatrix:
    """Power supply capacity row for a holdover arc.

    Each load's coefficient is P_I * (1 + (Q_I - Q_p) / (eps * Q_p)): the
    nominal draw plus the storage round-trip surcharge for operating hours
    the generator does not cover. The power-system column gets -P_0.
    """
    q_p = power_entry.working_hours_per_solar_day
    if q_p <= 0:
        raise ZeroPowerWorkingTime(f"{power_entry.id}: Q_p must be > 0")
    p0 = power_entry.specific_output if p0_effective is None else p0_effective
    R = len(space)
    H = np.zeros((1, R))
    for load in loads:
        col = space.index(load.commodity)
        H[0, col] += load.p_i * (1.0 + (load.q_i - q_p) / (storage_efficiency * q_p))
    H[0, space.index(power_entry.id)] -= p0
    return ConcurrencyMatrix(arc_key, H, ("power-supply",))


def energy_storage_row(
    loads,
    power_entry: PowerCatalogEntry,
    storage_entry: EnergyStorageEntry,
    space: CommoditySpace,
    arc_key: tuple = (),
    p0_effective: float | None = None,
) -> ConcurrencyMatrix:
    """Energy storage capacity row for a holdover arc.

    Orientation as printed: P_0 x_P - sum(P_I x_I) - gamma/(eps Q_p) x_E <= 0,
    i.e. the storage system must absorb the generation surplus.
    """
    q_p = power_entry.working_hours_per_solar_day
    if q_p <= 0:
        raise ZeroPowerWorkingTime(f"{power_entry.id}: Q_p must be > 0")
    p0 = power_entry.specific_output if p0_effective is None else p0_effective
    R = len(space)
    H = np.zeros((1, R))
    for load in loads:
        H[0, space.index(load.commodity)] -= load.p_i
    H[0, space.index(power_entry.id)] += p0
    gamma = storage_entry.specific_energy
    eps = storage_entry.efficiency
    H[0, space.index(storage_entry.id)] -= gamma / (eps * q_p)
    return ConcurrencyMatrix(arc_key, H, ("energy-storage",))


def nonneg_inflow_rows(
    F: TransformationMatrix, space: CommoditySpace | None = None
) -> ConcurrencyMatrix:
    """Inflow non-negativity: -F x <= 0 enforces F x >= 0 row by row."""
    R = F.F.shape[0]
    labels = tuple(
        f"nonneg-inflow:{space.commodities[i].id if space is not None else i}"
        for i in range(R)
    )
    return ConcurrencyMatrix(F.arc_key, -F.F.copy(), labels)


def storage_capacity_rows(
    storage_entries,
    space: CommoditySpace,
    inflow: TransformationMatrix | None = None,
    scale: float = 1.0,
    arc_key: tuple = (),
) -> ConcurrencyMatrix:
    """End-of-step containment rows for stored resources on a holdover arc.

    For each stored resource: (arriving inventory) - capacity * tanks <= 0.
    The arriving inventory is the inflow row (carried amount plus any
    production during the step), so tanks must cover what accumulates, not
    just what was carried in. ``scale`` shrinks tank capacity for the
    storage-sizing sensitivity studies.
    """
    R = len(space)
    by_resource: dict[str, list[StorageCatalogEntry]] = {}
    for e in storage_entries:
        by_resource.setdefault(e.stores, []).append(e)
    rows = []
    labels = []
    for resource in sorted(by_resource):
        if resource not in space:
            continue
        r = space.index(resource)
        row = np.zeros(R)
        if inflow is not None:
            row += inflow.F[r, :]
        else:
            row[r] = 1.0
        for tank in by_resource[resource]:
            if tank.id in space:
                row[space.index(tank.id)] -= tank.capacity_per_kg * scale
        rows.append(row)
        labels.append(f"storage:{resource}")
    if not rows:
        return ConcurrencyMatrix(arc_key, np.zeros((0, R)), ())
    return ConcurrencyMatrix(arc_key, np.vstack(rows), tuple(labels))


def maintenance_coefficient(rate_per_year: float, step_days: float) -> float:
    """Spare mass consumed per unit plant mass over one holdover step."""
    if rate_per_year < 0:
        raise ValueError(f"rate must be >= 0, got {rate_per_year}")
    return rate_per_year * step_days / DAYS_PER_YEAR


def apply_maintenance(
    F: TransformationMatrix,
    rate_per_year: float,
    step_days: float,
    space: CommoditySpace,
    spare_id: str,
    categories=(CAT_INFRA, CAT_POWER, CAT_ENERGY),
) -> TransformationMatrix:
    """Add spare consumption on a holdover arc's transformation matrix.

    The spare row loses rate * (step/365) per kilogram of deployed system
    mass in the maintained categories.
    """
    coef = maintenance_coefficient(rate_per_year, step_days)
    if coef == 0.0:
        return F
    out = F.F.copy()
    spare_row = space.index(spare_id)
    for cat in categories:
        for col in space.indices_of_category(cat):
            out[spare_row, col] -= coef
    return TransformationMatrix(F.arc_key, out)


def degradation_factor(
    entry: PowerCatalogEntry, elapsed_days: float, solar_day_hours: float = 708.0
) -> float:
    """Compound degradation factor after ``elapsed_days``."""
    if entry.degradation_rate == 0.0:
        return 1.0
    if entry.degradation_period == "sol":
        periods = elapsed_days * HOURS_PER_DAY / solar_day_hours
    else:
        periods = elapsed_days / DAYS_PER_YEAR
    return float((1.0 - entry.degradation_rate) ** periods)


def degradation_schedule(
    entry: PowerCatalogEntry, elapsed_days: float, solar_day_hours: float = 708.0
) -> float:
    """Effective P_0 at a grid time, degradation compounded from deploy."""
    return entry.specific_output * degradation_factor(entry, elapsed_days, solar_day_hours)


def operating_hours(q_i: float, step_days: float, solar_day_hours: float = 708.0) -> float:
    """Hours of operation over a holdover step for a Q_I h/solar-day system."""
    solar_days = step_days * HOURS_PER_DAY / solar_day_hours
    return q_i * solar_days

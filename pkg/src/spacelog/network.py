"""Static logistics network and its expansion over a discrete time grid.

Nodes are planets/orbits, edges are trajectory segments with a velocity
change and a time of flight, vehicles are the available spacecraft. The
time-expanded graph replicates the network across a uniform grid: transport
arcs cross between (node, step) pairs, holdover arcs keep commodities at a
node from one step to the next.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DanglingNodeReference, NonDivisibleHorizon

HOLDOVER = "HOLDOVER"

#: kind tags for arcs
TRANSPORT = "transport"
HOLD = "holdover"


@dataclass(frozen=True)
class NodeSpec:
    """A network node. ``body_class`` is metadata only."""

    id: str
    body_class: str = "orbit"  # surface | orbit | lagrange-point


@dataclass(frozen=True)
class TransportEdge:
    """Directed trajectory segment between two nodes.

    ``windows`` lists open launch intervals in days, sorted and
    non-overlapping. ``None`` means always open; an empty list means the
    edge can never be flown (all of its arcs force zero flow).
    """

    from_node: str
    to_node: str
    delta_v: float  # km/s
    tof_days: float
    windows: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.delta_v < 0:
            raise ValueError(f"delta_v must be >= 0, got {self.delta_v}")
        if self.tof_days < 0:
            raise ValueError(f"tof_days must be >= 0, got {self.tof_days}")
        if self.windows is not None:
            wins = tuple((float(a), float(b)) for a, b in self.windows)
            for a, b in wins:
                if b < a:
                    raise ValueError(f"window ({a}, {b}) reversed")
            for (_, b0), (a1, _) in zip(wins, wins[1:]):
                if a1 <= b0:
                    raise ValueError("windows must be sorted and non-overlapping")
            object.__setattr__(self, "windows", wins)

    def is_open(self, day: float) -> bool:
        if self.windows is None:
            return True
        return any(a - 1e-9 <= day <= b + 1e-9 for a, b in self.windows)


@dataclass(frozen=True)
class VehicleSpec:
    """Spacecraft design parameters.

    ``propellant_components`` maps commodity ids to mass fractions of the
    total propellant load (e.g. O2:H2 at 5.5:1 gives fractions
    5.5/6.5 and 1/6.5). Fractions must sum to 1.
    """

    id: str
    structure_mass: float  # S_v, kg
    propellant_capacity: float  # P_v, kg
    payload_capacity: float  # C_v, kg
    isp: float  # s
    propellant_components: tuple[tuple[str, float], ...]

    def __post_init__(self):
        for cap, name in (
            (self.structure_mass, "structure_mass"),
            (self.propellant_capacity, "propellant_capacity"),
            (self.payload_capacity, "payload_capacity"),
        ):
            if cap < 0:
                raise ValueError(f"{name} must be >= 0, got {cap}")
        total = sum(f for _, f in self.propellant_components)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(
                f"propellant component fractions sum to {total!r}, expected 1.0"
            )


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid: steps at 0, step_days, ..., horizon_days."""

    horizon_days: float
    step_days: float
    steps: tuple[float, ...] = field(init=False)

    def __post_init__(self):
        if self.step_days <= 0:
            raise NonDivisibleHorizon(f"step_days must be > 0, got {self.step_days}")
        ratio = self.horizon_days / self.step_days
        if abs(ratio - round(ratio)) > 1e-9 or self.horizon_days < 0:
            raise NonDivisibleHorizon(
                f"horizon {self.horizon_days} is not a multiple of step {self.step_days}"
            )
        n = int(round(ratio))
        object.__setattr__(
            self, "steps", tuple(i * self.step_days for i in range(n + 1))
        )

    @property
    def n_steps(self) -> int:
        """Number of time points on the grid."""
        return len(self.steps)

    def day_of(self, index: int) -> float:
        return self.steps[index]


@dataclass(frozen=True)
class Arc:
    """One arc of the time-expanded graph.

    ``vehicle`` is a vehicle id for transport arcs and ``HOLDOVER`` for
    holdover arcs. ``depart_step``/``arrive_step`` are grid indices.
    ``window_open`` is False when the underlying edge's windows exclude the
    departure day; such arcs force zero flow.
    """

    vehicle: str
    from_node: str
    to_node: str
    depart_step: int
    arrive_step: int
    kind: str
    window_open: bool = True

    @property
    def is_holdover(self) -> bool:
        return self.kind == HOLD

    def key(self) -> tuple:
        return (self.vehicle, self.from_node, self.to_node, self.depart_step)


@dataclass(frozen=True)
class TimeExpandedGraph:
    """Immutable time-expanded network; safe for concurrent reads."""

    nodes: tuple[NodeSpec, ...]
    edges: tuple[TransportEdge, ...]
    vehicles: tuple[VehicleSpec, ...]
    grid: TimeGrid
    arcs: tuple[Arc, ...]

    def node_ids(self) -> list[str]:
        return [n.id for n in self.nodes]

    def vehicle(self, vid: str) -> VehicleSpec:
        for v in self.vehicles:
            if v.id == vid:
                return v
        raise KeyError(vid)

    def edge(self, from_node: str, to_node: str) -> TransportEdge:
        for e in self.edges:
            if e.from_node == from_node and e.to_node == to_node:
                return e
        raise KeyError((from_node, to_node))


def build_time_grid(horizon_days: float, step_days: float) -> TimeGrid:
    """Build the uniform grid; raises NonDivisibleHorizon on a remainder."""
    return TimeGrid(horizon_days=horizon_days, step_days=step_days)


def steps_for_tof(tof_days: float, step_days: float) -> int:
    """Whole-step duration of a flight: nearest step, ties round up."""
    return int(math.floor(tof_days / step_days + 0.5))


def arc_duration(arc: Arc, grid: TimeGrid | None = None) -> int:
    """Duration of an arc in grid steps.

    Holdover arcs last exactly one step by construction; transport arcs
    carry the rounded flight time baked in at expansion.
    """
    return arc.arrive_step - arc.depart_step


def expand(
    nodes: list[NodeSpec],
    edges: list[TransportEdge],
    vehicles: list[VehicleSpec],
    grid: TimeGrid,
) -> TimeExpandedGraph:
    """Expand the static network over the grid.

    Emits one transport arc per (vehicle, edge, departure step) whose
    arrival stays on the grid, and one holdover arc per (node, consecutive
    step pair). Arc ordering is canonical: holdover arcs first, then
    transport arcs sorted by (vehicle, from, to, departure step).
    """
    ids = [n.id for n in nodes]
    if len(set(ids)) != len(ids):
        raise DanglingNodeReference(f"duplicate node ids in {ids}")
    known = set(ids)
    for e in edges:
        for ref in (e.from_node, e.to_node):
            if ref not in known:
                raise DanglingNodeReference(f"edge references unknown node {ref!r}")

    arcs: list[Arc] = []
    last = grid.n_steps - 1
    for node in nodes:
        for t in range(last):
            arcs.append(
                Arc(HOLDOVER, node.id, node.id, t, t + 1, HOLD, window_open=True)
            )

    transport: list[Arc] = []
    for vehicle in vehicles:
        for e in edges:
            dur = steps_for_tof(e.tof_days, grid.step_days)
            for t in range(last + 1):
                if t + dur > last:
                    continue
                transport.append(
                    Arc(
                        vehicle.id,
                        e.from_node,
                        e.to_node,
                        t,
                        t + dur,
                        TRANSPORT,
                        window_open=e.is_open(grid.day_of(t)),
                    )
                )
    transport.sort(key=lambda a: a.key())
    arcs.extend(transport)
    return TimeExpandedGraph(
        nodes=tuple(nodes),
        edges=tuple(edges),
        vehicles=tuple(vehicles),
        grid=grid,
        arcs=tuple(arcs),
    )

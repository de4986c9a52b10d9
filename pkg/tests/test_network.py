import pytest

from spacelog.errors import DanglingNodeReference, NonDivisibleHorizon
from spacelog.network import (
    HOLD,
    HOLDOVER,
    TRANSPORT,
    Arc,
    NodeSpec,
    TimeGrid,
    TransportEdge,
    VehicleSpec,
    arc_duration,
    build_time_grid,
    expand,
    steps_for_tof,
)


def simple_vehicle(vid="v1"):
    return VehicleSpec(vid, 1000.0, 5000.0, 5000.0, 300.0, (("prop", 1.0),))


class TestTimeGrid:
    def test_campaign_grid(self):
        grid = build_time_grid(360, 120)
        assert grid.steps == (0, 120, 240, 360)

    def test_empty_horizon(self):
        assert build_time_grid(0, 1).steps == (0,)

    def test_non_divisible(self):
        with pytest.raises(NonDivisibleHorizon):
            build_time_grid(300, 7)

    def test_zero_step_rejected(self):
        with pytest.raises(NonDivisibleHorizon):
            build_time_grid(10, 0)


class TestExpand:
    def test_hand_enumerated_counts(self):
        # 2 nodes, 1 edge of one step, 1 vehicle, 4 time points:
        # departures at steps 0..2 arrive <= 3; holdovers 2 nodes x 3 pairs
        grid = build_time_grid(360, 120)
        g = expand(
            [NodeSpec("a"), NodeSpec("b")],
            [TransportEdge("a", "b", 1.0, 120.0)],
            [simple_vehicle()],
            grid,
        )
        transport = [a for a in g.arcs if a.kind == TRANSPORT]
        holdover = [a for a in g.arcs if a.kind == HOLD]
        assert len(transport) == 3
        assert len(holdover) == 6
        assert all(a.arrive_step == a.depart_step + 1 for a in transport)

    def test_single_point_grid_no_arcs(self):
        g = expand([NodeSpec("a")], [], [], build_time_grid(0, 1))
        assert g.arcs == ()

    def test_empty_windows_close_everything(self):
        grid = build_time_grid(240, 120)
        g = expand(
            [NodeSpec("a"), NodeSpec("b")],
            [TransportEdge("a", "b", 1.0, 1.0, windows=())],
            [simple_vehicle()],
            grid,
        )
        transport = [a for a in g.arcs if a.kind == TRANSPORT]
        assert transport and all(not a.window_open for a in transport)

    def test_dangling_node(self):
        with pytest.raises(DanglingNodeReference):
            expand(
                [NodeSpec("a")],
                [TransportEdge("a", "ghost", 1.0, 1.0)],
                [simple_vehicle()],
                build_time_grid(120, 120),
            )

    def test_duplicate_node_ids(self):
        with pytest.raises(DanglingNodeReference):
            expand(
                [NodeSpec("a"), NodeSpec("a")], [], [], build_time_grid(120, 120)
            )

    def test_arc_count_formula(self):
        # brute enumeration over a richer instance
        grid = build_time_grid(600, 120)
        nodes = [NodeSpec(n) for n in ("a", "b", "c")]
        edges = [
            TransportEdge("a", "b", 1.0, 120.0),
            TransportEdge("b", "c", 1.0, 240.0),
            TransportEdge("a", "c", 1.0, 5.0),
        ]
        vehicles = [simple_vehicle("v1"), simple_vehicle("v2")]
        g = expand(nodes, edges, vehicles, grid)
        last = grid.n_steps - 1
        expected_transport = 0
        for _ in vehicles:
            for e in edges:
                dur = steps_for_tof(e.tof_days, grid.step_days)
                expected_transport += sum(
                    1 for t in range(last + 1) if t + dur <= last
                )
        assert sum(a.kind == TRANSPORT for a in g.arcs) == expected_transport
        assert sum(a.kind == HOLD for a in g.arcs) == len(nodes) * last

    def test_window_monotonicity(self):
        # shrinking a window set never opens more arcs
        grid = build_time_grid(600, 120)
        nodes = [NodeSpec("a"), NodeSpec("b")]
        vehicles = [simple_vehicle()]
        wide = expand(
            nodes,
            [TransportEdge("a", "b", 1.0, 1.0, windows=((0.0, 600.0),))],
            vehicles,
            grid,
        )
        narrow = expand(
            nodes,
            [TransportEdge("a", "b", 1.0, 1.0, windows=((120.0, 240.0),))],
            vehicles,
            grid,
        )
        n_open = lambda g: sum(a.window_open for a in g.arcs if a.kind == TRANSPORT)
        assert n_open(narrow) <= n_open(wide)

    def test_deterministic_ordering(self):
        grid = build_time_grid(360, 120)
        nodes = [NodeSpec("b"), NodeSpec("a")]
        edges = [
            TransportEdge("b", "a", 1.0, 1.0),
            TransportEdge("a", "b", 1.0, 1.0),
        ]
        vehicles = [simple_vehicle("v2"), simple_vehicle("v1")]
        g1 = expand(nodes, edges, vehicles, grid)
        g2 = expand(nodes, edges, vehicles, grid)
        assert g1.arcs == g2.arcs
        transport = [a for a in g1.arcs if a.kind == TRANSPORT]
        assert transport == sorted(transport, key=lambda a: a.key())


class TestArcDuration:
    def test_holdover_is_one_step(self):
        arc = Arc(HOLDOVER, "a", "a", 2, 3, HOLD)
        assert arc_duration(arc) == 1

    def test_full_step_flight(self):
        assert steps_for_tof(120.0, 120.0) == 1

    def test_sub_step_flight_rounds_down(self):
        assert steps_for_tof(5.0, 120.0) == 0

    def test_ties_round_up(self):
        assert steps_for_tof(60.0, 120.0) == 1


class TestVehicleSpec:
    def test_fraction_sum_enforced(self):
        with pytest.raises(ValueError):
            VehicleSpec("v", 1.0, 1.0, 1.0, 300.0, (("a", 0.6), ("b", 0.3)))

    def test_negative_capacity_rejected(self):
        with pytest.raises(ValueError):
            VehicleSpec("v", -1.0, 1.0, 1.0, 300.0, (("a", 1.0),))

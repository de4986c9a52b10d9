import math

import numpy as np
import pytest

from _fuzz import random_feasible_lp, random_scenario
from spacelog import commodity as cm
from spacelog import packing
from spacelog.commodity import Commodity, CommoditySpace, burn_matrix
from spacelog.errors import ConditionsViolated, InvalidAggregationMatrix, NTooLarge
from spacelog.formulation import ColumnMeta, MILPModel, RowMeta, build_full_size
from spacelog.network import VehicleSpec
from spacelog.packing import (
    aggregate_constraints,
    build_aggregation_matrix,
    build_plan,
    check_packing_conditions,
    intersect_partitions,
    pack_model,
    pack_variables,
    partition_by_concurrency,
    partition_by_cost,
    partition_by_transformation,
    select_packables,
    validate_aggregation_matrix,
)
from spacelog.solver.simplex import solve_lp


class TestPartitionByCost:
    def test_two_groups(self):
        assert partition_by_cost([1.0, 1.0, 2.0]) == ((0, 1), (2,))

    def test_all_equal(self):
        assert partition_by_cost([3.0] * 5) == ((0, 1, 2, 3, 4),)

    def test_all_distinct(self):
        assert partition_by_cost([1.0, 2.0, 3.0]) == ((0,), (1,), (2,))


class TestPartitionByTransformation:
    def test_identity_groups_everything(self):
        assert partition_by_transformation(np.eye(4)) == ((0, 1, 2, 3),)

    def test_electrolysis_matrix_separates_products(self):
        # rows agree off-block only when the production rates match; with
        # catalog-derived rates for O2 and H2 they do not
        a_o2, a_h2, b_h2o, a_swe = 1 / 83.3, 0.125 / 83.3, 1.125 / 83.3, 1 / 357.0
        F = np.eye(5)
        F[0, 3] = a_o2
        F[1, 3] = a_h2
        F[2, 3] = -b_h2o
        F[2, 4] = a_swe
        p = partition_by_transformation(F)
        group_of = {i: g for g in p for i in g}
        assert group_of[0] != group_of[1]

    def test_products_group_when_rates_match(self):
        F = np.eye(3)
        F[0, 2] = 0.5
        F[1, 2] = 0.5
        p = partition_by_transformation(F)
        group_of = {i: g for g in p for i in g}
        assert group_of[0] == group_of[1]

    def test_burn_matrix_splits_propellant(self):
        space = CommoditySpace(
            [
                Commodity("cargo", "continuous", "kg", cm.CAT_PAYLOAD),
                Commodity("prop", "continuous", "kg", cm.CAT_PROPELLANT),
                Commodity("veh", "discrete", "count", cm.CAT_VEHICLE),
            ]
        )
        v = VehicleSpec("veh", 10.0, 100.0, 100.0, 300.0, (("prop", 1.0),))
        dv = 300 * cm.G0 * math.log(2) / 1000.0
        F = burn_matrix(v, dv, space).F
        p = partition_by_transformation(F)
        assert (1,) in p  # the propellant row stands alone

    def test_pairwise_predicate_holds_within_groups(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            R = int(rng.integers(2, 7))
            F = rng.integers(0, 2, size=(R, R)).astype(float)
            p = partition_by_transformation(F)
            for g in p:
                for l in g:
                    for lp in g:
                        for u in range(R):
                            if u in (l, lp):
                                continue
                            assert F[l, u] == F[lp, u]


class TestPartitionByConcurrency:
    def test_identical_columns_group(self):
        H = np.array([[1.0, 1.0, 0.0], [2.0, 2.0, 1.0]])
        assert partition_by_concurrency(H) == ((0, 1), (2,))

    def test_capacity_layout_separates_cargo_from_prop(self):
        H = np.array([[1.0, 0.0, -5.0], [0.0, 1.0, -7.0]])
        assert partition_by_concurrency(H) == ((0,), (1,), (2,))

    def test_empty_h_single_group(self):
        assert partition_by_concurrency(np.zeros((0, 4))) == ((0, 1, 2, 3),)


class TestIntersect:
    def test_all_same(self):
        p = ((0, 1, 2),)
        assert intersect_partitions(p, p, p) == p

    def test_hand_example(self):
        p1 = ((0, 1), (2,))
        p2 = ((0,), (1, 2))
        p3 = ((0, 1, 2),)
        assert intersect_partitions(p1, p2, p3) == ((0,), (1,), (2,))

    def test_refinement_cardinality(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            R = int(rng.integers(2, 8))
            mk = lambda: partition_by_cost(rng.integers(0, 3, R).astype(float))
            p1, p2, p3 = mk(), mk(), mk()
            z = intersect_partitions(p1, p2, p3)
            assert len(z) >= max(len(p1), len(p2), len(p3))
            assert sorted(i for g in z for i in g) == list(range(R))


class TestSelectPackables:
    def test_all_singletons_empty(self):
        assert select_packables(((0,), (1,), (2,))) == ()

    def test_largest_first(self):
        z = ((0, 1, 2), (3, 4), (5,))
        assert select_packables(z, 1) == ((0, 1, 2),)

    def test_tie_break_smallest_member(self):
        z = ((3, 4), (1, 2))
        assert select_packables(z) == ((1, 2), (3, 4))

    def test_n_too_large(self):
        with pytest.raises(NTooLarge):
            select_packables(((0, 1),), 2)


class TestAggregationMatrix:
    def test_empty_selection_identity(self):
        agg = build_aggregation_matrix((), 4)
        assert np.array_equal(agg.G, np.eye(4))
        assert agg.n_after == 4

    def test_hand_example(self):
        agg = build_aggregation_matrix(((0, 1), (3, 4)), 5)
        assert (agg.n_packages, agg.n_packed, agg.n_after) == (2, 4, 3)
        expected = np.array(
            [[1, 1, 0, 0, 0], [0, 0, 0, 1, 1], [0, 0, 1, 0, 0]], dtype=float
        )
        assert np.array_equal(agg.G, expected)

    def test_conditions_always_hold(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            R = int(rng.integers(2, 9))
            picks = []
            pool = list(range(R))
            rng.shuffle(pool)
            while len(pool) >= 2 and rng.random() < 0.7:
                k = int(rng.integers(2, len(pool) + 1))
                picks.append(tuple(sorted(pool[:k])))
                pool = pool[k:]
            agg = build_aggregation_matrix(tuple(picks), R)
            validate_aggregation_matrix(agg.G)
            assert np.all(agg.G.sum(axis=0) == 1.0)
            assert np.all(agg.G.sum(axis=1) >= 1.0)

    def test_invalid_matrices_rejected(self):
        with pytest.raises(InvalidAggregationMatrix):
            validate_aggregation_matrix(np.array([[1.0, 1.0], [1.0, 0.0]]))
        with pytest.raises(InvalidAggregationMatrix):
            validate_aggregation_matrix(np.array([[1.0, 0.0], [0.0, 0.0]]))


def tiny_model(c, A, b, ub=None, integer=None):
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    rr, cc = np.nonzero(A)
    return MILPModel(
        c, rr, cc, A[rr, cc], b, np.zeros(n),
        np.full(n, np.inf) if ub is None else ub,
        [False] * n if integer is None else integer,
        [ColumnMeta(0, commodity=f"c{j}") for j in range(n)],
        [RowMeta("concurrency", arc_index=0, label=f"r{i}") for i in range(m)],
    )


class TestAggregateConstraints:
    def test_identity_grouping_unchanged(self):
        model = tiny_model([1.0, 2.0], [[1.0, 0.0], [0.0, 1.0]], [1.0, 2.0])
        out = aggregate_constraints(model, [(0,), (1,)])
        assert np.array_equal(out.dense(), model.dense())
        assert np.array_equal(out.rhs, model.rhs)

    def test_rows_summed(self):
        model = tiny_model([1.0], [[1.0], [2.0]], [3.0, 5.0])
        out = aggregate_constraints(model, [(0, 1)])
        assert out.n_rows == 1
        assert out.dense()[0, 0] == 3.0
        assert out.rhs[0] == 8.0

    def test_lower_bound_property_fuzz(self):
        rng = np.random.default_rng(77)
        for _ in range(60):
            c, A, b = random_feasible_lp(rng)
            model = tiny_model(c, A, b)
            base = solve_lp(c, A, b)
            m = A.shape[0]
            order = rng.permutation(m)
            groups, i = [], 0
            while i < m:
                k = int(rng.integers(1, m - i + 1))
                groups.append(tuple(sorted(order[i : i + k])))
                i += k
            agg = aggregate_constraints(model, groups)
            relaxed = solve_lp(agg.obj, agg.dense(), agg.rhs)
            if base.status == "optimal":
                assert relaxed.status in ("optimal", "unbounded")
                if relaxed.status == "optimal":
                    assert relaxed.obj <= base.obj + 1e-6


class TestPackVariables:
    def test_no_groups_identity(self):
        model = tiny_model([1.0, 1.0], [[1.0, 1.0]], [2.0])
        out = pack_variables(model, [])
        assert np.array_equal(out.dense(), model.dense())

    def test_duplicated_columns_merge_exactly(self):
        rng = np.random.default_rng(4)
        for _ in range(40):
            c, A, b = random_feasible_lp(rng, n_max=5, m_max=4)
            n = len(c)
            # duplicate the last column k times; coefficients become equal
            k = int(rng.integers(1, 4))
            A2 = np.hstack([A] + [A[:, -1:]] * k)
            c2 = np.concatenate([c, [c[-1]] * k])
            model = tiny_model(c2, A2, b)
            packed = pack_variables(model, [tuple(range(n - 1, n + k))])
            r_orig = solve_lp(c2, A2, b)
            r_pack = solve_lp(packed.obj, packed.dense(), packed.rhs)
            assert r_orig.status == r_pack.status
            if r_orig.status == "optimal":
                assert r_pack.obj == pytest.approx(r_orig.obj, abs=1e-6, rel=1e-6)

    def test_unequal_coefficients_rejected_with_witness(self):
        model = tiny_model([1.0, 1.0], [[1.0, 2.0]], [2.0])
        with pytest.raises(ConditionsViolated) as err:
            pack_variables(model, [(0, 1)])
        assert err.value.witness is not None

    def test_unequal_costs_rejected(self):
        model = tiny_model([1.0, 2.0], [[1.0, 1.0]], [2.0])
        with pytest.raises(ConditionsViolated):
            pack_variables(model, [(0, 1)])

    def test_discrete_columns_never_pack(self):
        model = tiny_model(
            [1.0, 1.0], [[1.0, 1.0]], [2.0], integer=[True, False]
        )
        with pytest.raises(ConditionsViolated):
            pack_variables(model, [(0, 1)])

    def test_package_metadata(self):
        model = tiny_model([1.0, 1.0, 2.0], [[1.0, 1.0, 0.0]], [2.0])
        out = pack_variables(model, [(0, 1)])
        assert out.n_cols == 2
        assert out.col_meta[0].package == ("c0", "c1")


class TestCheckConditions:
    def test_condition4_equals_direct_evaluation(self):
        rng = np.random.default_rng(12)
        for _ in range(40):
            m, n = int(rng.integers(2, 6)), int(rng.integers(3, 7))
            A = rng.integers(-2, 3, size=(m, n)).astype(float)
            c = rng.integers(0, 2, size=n).astype(float)
            model = tiny_model(c, A, b=np.ones(m))
            cols = sorted(rng.choice(n, size=2, replace=False).tolist())
            groups, i = [], 0
            order = rng.permutation(m)
            while i < m:
                k = int(rng.integers(1, m - i + 1))
                groups.append(tuple(sorted(order[i : i + k])))
                i += k
            ok, witness = check_packing_conditions(model, cols, groups)
            G = np.zeros((len(groups), m))
            for gi, g in enumerate(groups):
                G[gi, list(g)] = 1.0
            GA = G @ A
            direct = (
                np.array_equal(GA[:, cols[0]], GA[:, cols[1]])
                and c[cols[0]] == c[cols[1]]
            )
            assert ok == direct

    def test_cost_witness(self):
        model = tiny_model([1.0, 2.0], [[1.0, 1.0]], [1.0])
        ok, witness = check_packing_conditions(model, [0, 1])
        assert not ok and witness[0] == "objective"


class TestPackModel:
    def test_plan_reproducibility(self):
        rng = np.random.default_rng(100)
        scn = random_scenario(rng)
        full = build_full_size(scn)
        plan1 = build_plan(full, scn)
        plan2 = build_plan(build_full_size(scn), scn)
        assert plan1.col_groups == plan2.col_groups
        assert plan1.row_groups == plan2.row_groups

    def test_count_law_per_arc(self):
        rng = np.random.default_rng(200)
        found = 0
        for _ in range(10):
            scn = random_scenario(rng)
            full = build_full_size(scn)
            plan, packed = pack_model(full, scn)
            R = plan.n_commodities
            per_arc_cols = {}
            for meta in packed.col_meta:
                per_arc_cols[meta.arc_index] = per_arc_cols.get(meta.arc_index, 0) + 1
            for ap in plan.arc_plans:
                found += 1
                N, L, K = ap.counts
                assert K == N + R - L
                assert per_arc_cols[ap.arc_index] == K
        assert found > 0

    def test_no_discrete_in_packages(self):
        rng = np.random.default_rng(300)
        for _ in range(8):
            scn = random_scenario(rng)
            full = build_full_size(scn)
            plan, packed = pack_model(full, scn)
            discrete = {c.id for c in scn.space if c.kind == "discrete"}
            for group in plan.global_groups:
                assert not (set(group) & discrete)
            for ap in plan.arc_plans:
                for g in ap.packed_groups:
                    for k in g:
                        assert scn.space.commodities[k].kind == "continuous"

    def test_lunar_strictly_fewer_columns(self):
        from spacelog.scenario_cli.lunar import bundled_lunar_scenario

        scn = bundled_lunar_scenario(missions=1, reduced=True)
        full = build_full_size(scn)
        plan, packed = pack_model(full, scn)
        assert packed.n_cols < full.n_cols

import itertools

import numpy as np
import pytest
from scipy.optimize import linprog

from _fuzz import random_model
from spacelog.errors import DimensionMismatch
from spacelog.formulation import ColumnMeta, MILPModel, RowMeta
from spacelog.solver.branch_bound import SolveLimits, check_dimensions, solve_reference


def enumeration_oracle(model: MILPModel):
    """Enumerate integer assignments, LP over the continuous block."""
    A = model.dense()
    b = model.rhs
    c = model.obj
    int_idx = np.nonzero(model.integer)[0]
    cont_idx = np.nonzero(~model.integer)[0]
    best = None
    ranges = [
        range(int(np.ceil(model.lb[j])), int(np.floor(model.ub[j] + 1e-9)) + 1)
        for j in int_idx
    ]
    for assign in itertools.product(*ranges):
        bb = b - A[:, int_idx] @ np.asarray(assign, dtype=float)
        if cont_idx.size:
            r = linprog(
                c[cont_idx],
                A_ub=A[:, cont_idx],
                b_ub=bb,
                bounds=[
                    (model.lb[j], model.ub[j] if np.isfinite(model.ub[j]) else None)
                    for j in cont_idx
                ],
                method="highs",
            )
            if r.status == 0:
                val = r.fun + float(c[int_idx] @ assign)
                best = val if best is None else min(best, val)
        else:
            if np.all(bb >= -1e-9):
                val = float(c[int_idx] @ assign)
                best = val if best is None else min(best, val)
    return best


class TestSolveReference:
    def test_min_x_at_least_three(self):
        model = MILPModel(
            [1.0], [0], [0], [-1.0], [-3.0], [0.0], [np.inf], [False],
            [ColumnMeta(0, commodity="x")],
            [RowMeta("concurrency", arc_index=0, label="r0")],
        )
        sol = solve_reference(model)
        assert sol.status == "optimal"
        assert sol.objective == pytest.approx(3.0)

    def test_empty_model(self):
        model = MILPModel([], [], [], [], [], [], [], [], [], [])
        sol = solve_reference(model)
        assert sol.status == "optimal" and sol.objective == 0.0

    def test_matches_enumeration_oracle(self):
        rng = np.random.default_rng(23)
        solved = 0
        for _ in range(120):
            model = random_model(rng)
            sol = solve_reference(model, SolveLimits(max_seconds=20))
            expected = enumeration_oracle(model)
            if expected is None:
                assert sol.status == "infeasible"
            else:
                solved += 1
                assert sol.status == "optimal"
                assert sol.objective == pytest.approx(expected, abs=2e-6, rel=1e-6)
        assert solved > 30

    def test_incumbent_never_below_bound(self):
        rng = np.random.default_rng(31)
        for _ in range(40):
            model = random_model(rng)
            sol = solve_reference(model, SolveLimits(max_seconds=20))
            if sol.status == "optimal":
                assert sol.objective >= sol.bound - 1e-6

    def test_limit_status_with_tiny_budget(self):
        rng = np.random.default_rng(7)
        hit_limit = False
        for _ in range(50):
            model = random_model(rng, n_max=8, int_max=3)
            sol = solve_reference(model, SolveLimits(max_seconds=100, max_nodes=2))
            if sol.status == "limit":
                hit_limit = True
                break
        assert hit_limit

    def test_determinism(self):
        rng = np.random.default_rng(40)
        model = random_model(rng)
        s1 = solve_reference(model, SolveLimits(max_seconds=20))
        s2 = solve_reference(model, SolveLimits(max_seconds=20))
        assert s1.status == s2.status
        if s1.status == "optimal":
            assert s1.objective == s2.objective
            assert np.array_equal(s1.values, s2.values)

    def test_dimension_check(self):
        model = MILPModel(
            [1.0], [0], [0], [1.0], [1.0], [0.0], [np.inf], [False],
            [ColumnMeta(0, commodity="x")],
            [RowMeta("concurrency", arc_index=0, label="r0")],
        )
        with pytest.raises(DimensionMismatch):
            check_dimensions(model, [1.0, 2.0])

    def test_limits_validation(self):
        with pytest.raises(ValueError):
            SolveLimits(max_seconds=0)
        with pytest.raises(ValueError):
            SolveLimits(abs_gap=0)

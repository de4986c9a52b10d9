import numpy as np
import pytest
from scipy.optimize import linprog

from spacelog.solver.simplex import BoundedSimplex, solve_lp


def scipy_solve(c, A, b, lb, ub):
    bounds = [(l, u if np.isfinite(u) else None) for l, u in zip(lb, ub)]
    return linprog(c, A_ub=A, b_ub=b, bounds=bounds, method="highs")


class TestBasics:
    def test_min_x_at_least_three(self):
        r = solve_lp([1.0], [[-1.0]], [-3.0])
        assert r.status == "optimal"
        assert r.obj == pytest.approx(3.0)

    def test_infeasible(self):
        r = solve_lp([1.0], [[1.0], [-1.0]], [1.0, -2.0])
        assert r.status == "infeasible"

    def test_unbounded(self):
        r = solve_lp([-1.0], [[-1.0]], [0.0])
        assert r.status == "unbounded"

    def test_upper_bounds_bind(self):
        r = solve_lp([-1.0, -1.0], [[1.0, 1.0]], [10.0], ub=[2.0, 3.0])
        assert r.status == "optimal"
        assert r.obj == pytest.approx(-5.0)

    def test_empty_rows(self):
        r = solve_lp([2.0], np.zeros((0, 1)), np.zeros(0), lb=[1.0])
        assert r.status == "optimal"
        assert r.obj == pytest.approx(2.0)

    def test_crossing_bounds_infeasible(self):
        engine = BoundedSimplex([1.0], np.array([[1.0]]), [5.0], [3.0], [1.0])
        assert engine.optimize().status == "infeasible"


class TestRandomAgreement:
    def test_lp_against_highs(self):
        rng = np.random.default_rng(11)
        solved = 0
        for _ in range(250):
            m = int(rng.integers(1, 9))
            n = int(rng.integers(1, 9))
            A = rng.normal(size=(m, n)) * rng.integers(0, 2, size=(m, n))
            b = rng.normal(size=m) + 1.0
            c = rng.normal(size=n)
            lb = np.where(rng.random(n) < 0.3, rng.uniform(0, 0.4, n), 0.0)
            ub = np.where(rng.random(n) < 0.5, rng.uniform(0.5, 5, n), np.inf)
            ub = np.maximum(ub, lb)
            mine = solve_lp(c, A, b, lb=lb, ub=ub)
            ref = scipy_solve(c, A, b, lb, ub)
            if ref.status == 0:
                solved += 1
                assert mine.status == "optimal"
                assert mine.obj == pytest.approx(ref.fun, abs=1e-6, rel=1e-6)
            elif ref.status == 2:
                # presolve can report infeasible for unbounded-but-feasible
                # problems; accept either verdict there
                assert mine.status in ("infeasible", "unbounded")
            elif ref.status == 3:
                assert mine.status == "unbounded"
        assert solved > 50

    def test_weak_duality_certificate(self):
        # c x = y b at the optimum when only x >= 0 bounds are active
        rng = np.random.default_rng(5)
        checked = 0
        for _ in range(200):
            m = int(rng.integers(1, 7))
            n = int(rng.integers(1, 7))
            A = rng.normal(size=(m, n))
            b = rng.uniform(0.5, 3.0, size=m)
            c = rng.uniform(0.0, 2.0, size=n)
            r = solve_lp(c, A, b)
            if r.status == "optimal":
                checked += 1
                assert r.obj == pytest.approx(float(r.y @ b), abs=1e-7, rel=1e-7)
                # duals of <= rows in a minimization are nonpositive ... the
                # sign convention here: y = c_B B^-1, complementary slack
                slack = b - A @ r.x
                assert np.all((np.abs(r.y) < 1e-7) | (slack < 1e-6))
        assert checked > 50


class TestWarmRestart:
    def test_bound_change_matches_cold_solve(self):
        rng = np.random.default_rng(3)
        for _ in range(40):
            m = int(rng.integers(2, 7))
            n = int(rng.integers(2, 7))
            A = rng.normal(size=(m, n))
            b = rng.uniform(0.5, 4.0, m)
            c = rng.uniform(-1.0, 2.0, n)
            ub = rng.uniform(1.0, 6.0, n)
            engine = BoundedSimplex(c, A, b, np.zeros(n), ub)
            engine.optimize()
            j = int(rng.integers(0, n))
            new_lb, new_ub = 0.5, 0.5
            engine.set_bounds(j, new_lb, new_ub)
            warm = engine.optimize()
            lb2 = np.zeros(n)
            lb2[j] = new_lb
            ub2 = ub.copy()
            ub2[j] = new_ub
            cold = BoundedSimplex(c, A, b, lb2, ub2).optimize()
            assert warm.status == cold.status
            if warm.status == "optimal":
                assert warm.obj == pytest.approx(cold.obj, abs=1e-7, rel=1e-7)

    def test_save_load_state(self):
        rng = np.random.default_rng(9)
        A = rng.normal(size=(4, 5))
        b = rng.uniform(1, 3, 4)
        c = rng.uniform(0, 1, 5)
        engine = BoundedSimplex(c, A, b, np.zeros(5), np.full(5, np.inf))
        base = engine.optimize()
        state = engine.save_state()
        engine.set_bounds(0, 1.0, 2.0)
        engine.optimize()
        engine.load_state(state)
        engine.set_all_bounds(np.zeros(5), np.full(5, np.inf))
        again = engine.optimize()
        assert again.obj == pytest.approx(base.obj)


class TestDeterminism:
    def test_repeat_solves_identical(self):
        rng = np.random.default_rng(17)
        A = rng.normal(size=(6, 8))
        b = rng.uniform(0.5, 2.0, 6)
        c = rng.normal(size=8)
        r1 = solve_lp(c, A, b)
        r2 = solve_lp(c, A, b)
        assert r1.status == r2.status
        if r1.status == "optimal":
            assert r1.obj == r2.obj
            assert np.array_equal(r1.x, r2.x)

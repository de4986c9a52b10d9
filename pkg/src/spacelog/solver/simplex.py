"""Bounded-variable simplex on a dense tableau.

Solves  min c x  s.t.  A x <= b,  l <= x <= u.  Slack columns are appended
internally so the starting basis is the identity. The engine supports
primal iterations (Dantzig pricing with a Bland fallback after a run of
degenerate pivots) and dual iterations, which makes warm restarts after
bound changes cheap: the tableau stays valid across branch-and-bound nodes
because bounds never enter it.

Intended for desk-scale models; everything is dense float64.
"""

from __future__ import annotations

import numpy as np

from ..errors import NumericalFailure

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7
DJ_TOL = 1e-9
BLAND_AFTER = 1000  # degenerate pivots before switching to Bland's rule

AT_LOWER = 0
AT_UPPER = 1
BASIC = 2


class SimplexResult:
    def __init__(self, status, x=None, obj=None, y=None, dj=None, iterations=0):
        self.status = status  # optimal | infeasible | unbounded
        self.x = x
        self.obj = obj
        self.y = y  # row duals (c_B B^-1)
        self.dj = dj  # reduced costs of structural columns
        self.iterations = iterations


class BoundedSimplex:
    """Reusable engine: mutate bounds between solves for warm restarts."""

    def __init__(self, c, A, b, lb, ub):
        A = np.asarray(A, dtype=float)
        self.m, self.n = A.shape
        m, n = self.m, self.n
        self.c = np.concatenate([np.asarray(c, dtype=float), np.zeros(m)])
        self.lb = np.concatenate([np.asarray(lb, dtype=float), np.zeros(m)])
        self.ub = np.concatenate(
            [np.asarray(ub, dtype=float), np.full(m, np.inf)]
        )
        self.b = np.asarray(b, dtype=float)
        # tableau T = B^-1 [A | I]; slack basis means T starts as [A | I]
        self.T = np.hstack([A, np.eye(m)])
        self.beta = self.b.copy()  # B^-1 b
        self.basis = np.arange(n, n + m)
        self.status_of = np.full(n + m, AT_LOWER, dtype=np.int8)
        self.status_of[self.basis] = BASIC
        self.rho = self.c.copy()  # reduced costs c - c_B B^-1 [A|I]
        self.iterations = 0
        self._degenerate_run = 0

    # --- state snapshots (branch-and-bound anchors) -------------------------

    def save_state(self) -> dict:
        return {
            "T": self.T.copy(),
            "beta": self.beta.copy(),
            "basis": self.basis.copy(),
            "status": self.status_of.copy(),
            "rho": self.rho.copy(),
        }

    def load_state(self, state: dict) -> None:
        self.T[...] = state["T"]
        self.beta[...] = state["beta"]
        self.basis[...] = state["basis"]
        self.status_of[...] = state["status"]
        self.rho[...] = state["rho"]

    # --- bound mutation (branch and bound) ---------------------------------

    def set_bounds(self, j: int, lb: float, ub: float) -> None:
        self.lb[j] = lb
        self.ub[j] = ub
        if self.status_of[j] == AT_UPPER and not np.isfinite(ub):
            self.status_of[j] = AT_LOWER

    def set_all_bounds(self, lb, ub) -> None:
        self.lb[: self.n] = lb
        self.ub[: self.n] = ub
        at_upper = self.status_of == AT_UPPER
        bad = at_upper & ~np.isfinite(self.ub)
        self.status_of[bad] = AT_LOWER

    # --- state -------------------------------------------------------------

    def _rest_values(self) -> np.ndarray:
        rest = np.where(self.status_of == AT_UPPER, self.ub, self.lb)
        rest[self.basis] = 0.0
        return rest

    def _basic_values(self) -> np.ndarray:
        rest = self._rest_values()
        nz = np.nonzero(rest)[0]
        xb = self.beta.copy()
        if nz.size:
            xb -= self.T[:, nz] @ rest[nz]
        return xb

    def solution(self) -> np.ndarray:
        x = self._rest_values()
        x[self.basis] = self._basic_values()
        return x[: self.n]

    def objective(self) -> float:
        x = self._rest_values()
        x[self.basis] = self._basic_values()
        return float(self.c @ x)

    def duals(self) -> np.ndarray:
        return self.c[self.basis] @ self.T[:, self.n :]

    def reduced_costs(self) -> np.ndarray:
        return self.rho[: self.n].copy()

    # --- pivoting ----------------------------------------------------------

    def _pivot(self, row: int, col: int) -> None:
        piv = self.T[row, col]
        if abs(piv) < PIVOT_TOL:
            raise NumericalFailure(f"pivot {piv!r} below tolerance")
        self.T[row, :] /= piv
        self.beta[row] /= piv
        colvals = self.T[:, col].copy()
        colvals[row] = 0.0
        self.T -= np.outer(colvals, self.T[row, :])
        self.beta -= colvals * self.beta[row]
        # keep reduced costs in sync
        r = self.rho[col]
        if r != 0.0:
            self.rho -= r * self.T[row, :]
        leaving = self.basis[row]
        self.basis[row] = col
        self.status_of[col] = BASIC
        # numerical hygiene on the pivot column
        self.T[:, col] = 0.0
        self.T[row, col] = 1.0
        self.rho[col] = 0.0
        self.iterations += 1
        return leaving

    # --- primal simplex -----------------------------------------------------

    def primal(self, max_iter: int | None = None) -> str:
        """Primal iterations from a primal-feasible basis.

        Returns 'optimal' or 'unbounded'. Assumes the current point is
        primal feasible within FEAS_TOL (caller's responsibility).
        """
        m, n = self.m, self.n
        ntot = n + m
        if max_iter is None:
            max_iter = 50 * (m + ntot) + 20000
        bland = False
        it = 0
        while True:
            it += 1
            if it > max_iter:
                raise NumericalFailure("primal iteration limit; possible cycling")
            eligible_low = (self.status_of == AT_LOWER) & (self.rho < -DJ_TOL)
            eligible_up = (self.status_of == AT_UPPER) & (self.rho > DJ_TOL)
            candidates = np.nonzero(eligible_low | eligible_up)[0]
            if candidates.size == 0:
                return "optimal"
            if bland or self._degenerate_run > BLAND_AFTER:
                j = int(candidates[0])
                bland = True
            else:
                j = int(candidates[np.argmax(np.abs(self.rho[candidates]))])
            sigma = 1.0 if self.status_of[j] == AT_LOWER else -1.0
            step, row = self._primal_ratio(j, sigma)
            if step is None:
                return "unbounded"
            if row == -1:
                # bound flip: j travels to its opposite bound, no pivot
                self.status_of[j] = AT_UPPER if sigma > 0 else AT_LOWER
                self._degenerate_run = 0
                self.iterations += 1
                continue
            if step < PIVOT_TOL:
                self._degenerate_run += 1
            else:
                self._degenerate_run = 0
            leaving = self.basis[row]
            dirn = sigma * self.T[:, j]
            hit_upper = dirn[row] < 0
            self._pivot(row, j)
            self.status_of[leaving] = AT_UPPER if hit_upper else AT_LOWER
            if not np.isfinite(self.ub[leaving]) and hit_upper:
                raise NumericalFailure("leaving variable sent to infinite bound")

    def _primal_ratio(self, j: int, sigma: float):
        """Bounded ratio test for entering column j moving by +sigma.

        Returns (step, row); row == -1 encodes a bound flip of j itself,
        (None, None) means unbounded.
        """
        xb = self._basic_values()
        d = sigma * self.T[:, j]  # xb changes by -d * t
        lo = self.lb[self.basis]
        hi = self.ub[self.basis]
        best = self.ub[j] - self.lb[j]  # flip distance (may be inf)
        row = -1
        dec = d > PIVOT_TOL  # basic decreasing toward its lower bound
        inc = d < -PIVOT_TOL  # basic increasing toward its upper bound
        with np.errstate(invalid="ignore", divide="ignore"):
            t_dec = np.where(dec, (xb - lo) / np.where(dec, d, 1.0), np.inf)
            t_inc = np.where(
                inc & np.isfinite(hi), (hi - xb) / np.where(inc, -d, 1.0), np.inf
            )
        t_dec = np.where(t_dec < 0, 0.0, t_dec)
        t_inc = np.where(t_inc < 0, 0.0, t_inc)
        ratios = np.minimum(t_dec, t_inc)
        r = int(np.argmin(ratios)) if ratios.size else -1
        if r >= 0 and ratios[r] < best - 1e-12:
            # tie-break deterministically: smallest ratio, then largest |d|
            tied = np.nonzero(ratios <= ratios[r] + 1e-12)[0]
            if tied.size > 1:
                r = int(tied[np.argmax(np.abs(d[tied]))])
            return float(max(ratios[r], 0.0)), r
        if not np.isfinite(best):
            return None, None
        return float(best), -1

    # --- dual simplex --------------------------------------------------------

    def dual(self, max_iter: int | None = None) -> str:
        """Dual iterations from a dual-feasible basis.

        Returns 'optimal' (primal feasible reached) or 'infeasible'
        (dual unbounded). Assumes reduced costs are dual feasible.
        """
        m, n = self.m, self.n
        if m == 0:
            return "optimal"
        if max_iter is None:
            max_iter = 50 * (m + n) + 20000
        it = 0
        bland = False
        while True:
            it += 1
            if it > max_iter:
                raise NumericalFailure("dual iteration limit; possible cycling")
            xb = self._basic_values()
            lo = self.lb[self.basis]
            hi = self.ub[self.basis]
            below = lo - xb
            above = xb - hi
            viol = np.maximum(below, above)
            r = int(np.argmax(viol))
            if viol[r] <= FEAS_TOL:
                return "optimal"
            if bland or self._degenerate_run > BLAND_AFTER:
                rows = np.nonzero(viol > FEAS_TOL)[0]
                r = int(rows[np.argmin(self.basis[rows])])
                bland = True
            leaving_below = below[r] > above[r]
            row_vals = self.T[r, :]
            # entering candidates keep dual feasibility: ratio rho_j / alpha
            if leaving_below:
                # xb_r must increase: entering at lower with alpha < 0,
                # entering at upper with alpha > 0
                cand_mask = (
                    ((self.status_of == AT_LOWER) & (row_vals < -PIVOT_TOL))
                    | ((self.status_of == AT_UPPER) & (row_vals > PIVOT_TOL))
                )
            else:
                cand_mask = (
                    ((self.status_of == AT_LOWER) & (row_vals > PIVOT_TOL))
                    | ((self.status_of == AT_UPPER) & (row_vals < -PIVOT_TOL))
                )
            cand = np.nonzero(cand_mask)[0]
            if cand.size == 0:
                return "infeasible"
            ratios = np.abs(self.rho[cand] / row_vals[cand])
            if bland:
                best = ratios.min()
                tied = cand[ratios <= best + 1e-12]
                j = int(tied.min())
            else:
                k = int(np.argmin(ratios))
                best = ratios[k]
                tied = cand[ratios <= best + 1e-12]
                j = int(tied[np.argmax(np.abs(row_vals[tied]))])
            if best < DJ_TOL:
                self._degenerate_run += 1
            else:
                self._degenerate_run = 0
            was_violated_low = leaving_below
            leaving = self.basis[r]
            self._pivot(r, j)
            self.status_of[leaving] = AT_LOWER if was_violated_low else AT_UPPER

    # --- driver ---------------------------------------------------------------

    def optimize(self) -> SimplexResult:
        """Cold or warm solve from the current basis.

        Reduced costs are refreshed on entry so the path choice (primal
        directly, dual then primal cleanup, or a zero-objective dual
        feasibility pass) never runs on drifted values.
        """
        if np.any(self.lb > self.ub + 1e-12):
            return SimplexResult("infeasible", iterations=self.iterations)
        self._degenerate_run = 0
        self.rho = self._recompute_rho()
        if self._primal_feasible():
            status = self.primal()
            if status == "unbounded":
                return SimplexResult("unbounded", iterations=self.iterations)
            return self._optimal_result()
        if self._dual_feasible():
            status = self.dual()
            if status == "infeasible":
                return SimplexResult("infeasible", iterations=self.iterations)
            status = self.primal()
            if status == "unbounded":
                return SimplexResult("unbounded", iterations=self.iterations)
            return self._optimal_result()
        # feasibility pass: any basis is dual feasible for a zero objective
        saved_c = self.c.copy()
        self.c = np.zeros_like(self.c)
        self.rho = np.zeros_like(self.rho)
        try:
            status = self.dual()
        finally:
            self.c = saved_c
            self.rho = self._recompute_rho()
        if status == "infeasible":
            return SimplexResult("infeasible", iterations=self.iterations)
        status = self.primal()
        if status == "unbounded":
            return SimplexResult("unbounded", iterations=self.iterations)
        return self._optimal_result()

    def _primal_feasible(self) -> bool:
        if self.m == 0:
            return True
        xb = self._basic_values()
        lo = self.lb[self.basis]
        hi = self.ub[self.basis]
        return bool(np.all(xb >= lo - FEAS_TOL) and np.all(xb <= hi + FEAS_TOL))

    def _dual_feasible(self) -> bool:
        bad_low = (self.status_of == AT_LOWER) & (self.rho < -DJ_TOL)
        bad_up = (self.status_of == AT_UPPER) & (self.rho > DJ_TOL)
        return not (bad_low.any() or bad_up.any())

    def _recompute_rho(self) -> np.ndarray:
        return self.c - self.c[self.basis] @ self.T

    def _optimal_result(self) -> SimplexResult:
        x = self.solution()
        obj = self.objective()
        return SimplexResult(
            "optimal",
            x=x,
            obj=obj,
            y=self.duals(),
            dj=self.reduced_costs(),
            iterations=self.iterations,
        )


def solve_lp(c, A, b, lb=None, ub=None) -> SimplexResult:
    """One-shot LP solve; builds a fresh engine."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    m, n = A.shape
    if lb is None:
        lb = np.zeros(n)
    if ub is None:
        ub = np.full(n, np.inf)
    engine = BoundedSimplex(c, A, b, lb, ub)
    return engine.optimize()

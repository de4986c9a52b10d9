"""Exact reference solver: LP relaxations by the bounded-variable simplex,
integrality by best-first branch and bound.

Branching is on the most fractional integer column (ties: lowest index).
A light presolve removes fixed columns and empty rows before the root
solve; node restarts reuse the root engine's tableau, so each node costs a
handful of dual pivots rather than a cold solve.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, NumericalFailure
from ..formulation import MILPModel, Solution
from .simplex import BoundedSimplex

INT_TOL = 1e-6


@dataclass(frozen=True)
class SolveLimits:
    max_seconds: float = 900.0
    max_nodes: int = 200000
    abs_gap: float = 1e-9
    rel_gap: float = 1e-6

    def __post_init__(self):
        if self.max_seconds <= 0 or self.max_nodes <= 0:
            raise ValueError("limits must be positive")
        if self.abs_gap <= 0 or self.rel_gap <= 0:
            raise ValueError("gaps must be positive")


class _Presolved:
    """Model with fixed columns substituted out and empty rows dropped."""

    def __init__(self, model: MILPModel):
        n = model.n_cols
        lb, ub = model.lb.copy(), model.ub.copy()
        # integer bounds can be tightened inward for free
        ints = np.nonzero(model.integer)[0]
        lb[ints] = np.ceil(lb[ints] - INT_TOL)
        ub[ints] = np.where(np.isfinite(ub[ints]), np.floor(ub[ints] + INT_TOL), np.inf)
        self.crossing = bool(np.any(lb > ub + 1e-12))
        fixed = ub - lb <= 1e-12
        self.keep_cols = np.nonzero(~fixed)[0]
        self.fixed_cols = np.nonzero(fixed)[0]
        self.n_orig = n
        self.model = model

        self.lb_full = lb
        A = np.zeros((model.n_rows, n))
        np.add.at(A, (model.a_rows, model.a_cols), model.a_vals)
        rhs = model.rhs.astype(float).copy()
        self.fixed_contribution = 0.0
        if self.fixed_cols.size:
            xf = lb[self.fixed_cols]
            rhs -= A[:, self.fixed_cols] @ xf
            self.fixed_contribution = float(model.obj[self.fixed_cols] @ xf)
        A = A[:, self.keep_cols]
        nonempty = np.abs(A).sum(axis=1) > 0
        self.infeasible_row = bool(np.any(~nonempty & (rhs < -1e-9)))
        self.keep_rows = np.nonzero(nonempty)[0]
        self.A = A[self.keep_rows, :]
        self.rhs = rhs[self.keep_rows]
        self.obj = model.obj[self.keep_cols]
        self.lb = lb[self.keep_cols]
        self.ub = ub[self.keep_cols]
        self.integer = model.integer[self.keep_cols]

    def expand(self, x_reduced: np.ndarray) -> np.ndarray:
        x = np.zeros(self.n_orig)
        x[self.keep_cols] = x_reduced
        if self.fixed_cols.size:
            x[self.fixed_cols] = self.lb_full[self.fixed_cols]
        return x


def solve_reference(model: MILPModel, limits: SolveLimits | None = None) -> Solution:
    """Solve a MILPModel to proven optimality (or a limit status)."""
    limits = limits or SolveLimits()
    t0 = time.monotonic()
    if model.n_cols == 0:
        return Solution("optimal", 0.0, np.zeros(0), bound=0.0)
    pre = _Presolved(model)
    if pre.infeasible_row or pre.crossing:
        return Solution("infeasible", None, None)
    if pre.keep_cols.size == 0:
        obj = pre.fixed_contribution
        return Solution("optimal", obj, pre.expand(np.zeros(0)), bound=obj)

    engine = BoundedSimplex(pre.obj, pre.A, pre.rhs, pre.lb, pre.ub)
    root = engine.optimize()
    nodes_seen = 1
    if root.status == "infeasible":
        return Solution("infeasible", None, None, nodes=nodes_seen)
    if root.status == "unbounded":
        return Solution("unbounded", None, None, nodes=nodes_seen)

    int_cols = np.nonzero(pre.integer)[0]
    frac = _fractional(root.x, int_cols)
    if frac is None:
        obj = root.obj + pre.fixed_contribution
        return Solution(
            "optimal",
            obj,
            pre.expand(root.x),
            bound=obj,
            iterations=engine.iterations,
            nodes=nodes_seen,
            wall_seconds=time.monotonic() - t0,
        )

    # every node restarts from the root basis: bounded, drift-free warm starts
    anchor = engine.save_state()

    incumbent_obj = np.inf
    incumbent_x = None
    counter = 0
    # node = (lp bound, tiebreak, {col: (lb, ub)})
    heap: list[tuple[float, int, dict]] = []

    def push(bound: float, changes: dict):
        nonlocal counter
        counter += 1
        heapq.heappush(heap, (bound, counter, changes))

    def node_solve(changes: dict):
        engine.load_state(anchor)
        engine.set_all_bounds(pre.lb, pre.ub)
        for j, (lo, hi) in changes.items():
            engine.set_bounds(j, lo, hi)
        try:
            return engine.optimize()
        except NumericalFailure:
            fresh = BoundedSimplex(pre.obj, pre.A, pre.rhs, pre.lb, pre.ub)
            for j, (lo, hi) in changes.items():
                fresh.set_bounds(j, lo, hi)
            return fresh.optimize()

    heur = _dive_heuristic(node_solve, pre, root, int_cols)
    if heur is not None:
        incumbent_obj, incumbent_x = heur

    j = frac
    lo, hi = float(np.floor(root.x[j])), float(np.ceil(root.x[j]))
    push(root.obj, {j: (pre.lb[j], lo)})
    push(root.obj, {j: (hi, pre.ub[j])})
    best_bound = root.obj
    status = "optimal"

    while heap:
        if time.monotonic() - t0 > limits.max_seconds or nodes_seen >= limits.max_nodes:
            status = "limit"
            break
        bound, _, changes = heapq.heappop(heap)
        best_bound = bound
        if _prune(bound, incumbent_obj, limits):
            # best-first: every remaining node is at least as bad
            best_bound = min(bound, incumbent_obj)
            break
        nodes_seen += 1
        res = node_solve(changes)
        if res.status == "infeasible":
            continue
        if res.status == "unbounded":
            return Solution("unbounded", None, None, nodes=nodes_seen)
        if _prune(res.obj, incumbent_obj, limits):
            continue
        frac = _fractional(res.x, int_cols)
        if frac is None:
            if res.obj < incumbent_obj - 1e-12:
                incumbent_obj = res.obj
                incumbent_x = res.x.copy()
            continue
        if nodes_seen % 40 == 2:
            dived = _dive_heuristic(node_solve, pre, res, int_cols, base=changes)
            if dived is not None and dived[0] < incumbent_obj - 1e-12:
                incumbent_obj, incumbent_x = dived[0], dived[1].copy()
        j = frac
        lo, hi = float(np.floor(res.x[j])), float(np.ceil(res.x[j]))
        left = dict(changes)
        cur_lo, cur_hi = left.get(j, (pre.lb[j], pre.ub[j]))
        left[j] = (cur_lo, min(lo, cur_hi))
        right = dict(changes)
        right[j] = (max(hi, cur_lo), cur_hi)
        push(res.obj, left)
        push(res.obj, right)

    if heap and status != "limit":
        best_bound = min(best_bound, min(b for b, _, _ in heap))
    if not heap and status == "optimal":
        best_bound = incumbent_obj

    wall = time.monotonic() - t0
    shift = pre.fixed_contribution
    if incumbent_x is None:
        if status == "limit":
            return Solution(
                "limit", None, None, bound=best_bound + shift, nodes=nodes_seen, wall_seconds=wall
            )
        return Solution("infeasible", None, None, nodes=nodes_seen, wall_seconds=wall)
    return Solution(
        status,
        incumbent_obj + shift,
        pre.expand(incumbent_x),
        bound=min(best_bound, incumbent_obj) + shift,
        iterations=engine.iterations,
        nodes=nodes_seen,
        wall_seconds=wall,
    )


def _prune(bound: float, incumbent: float, limits: SolveLimits) -> bool:
    if not np.isfinite(incumbent):
        return False
    gap = max(limits.abs_gap, limits.rel_gap * abs(incumbent))
    return bound >= incumbent - gap


def _fractional(x: np.ndarray, int_cols: np.ndarray):
    """Most fractional integer column (fraction closest to one half);
    ties broken by lowest index. None when integral."""
    if int_cols.size == 0:
        return None
    vals = x[int_cols]
    frac = np.abs(vals - np.round(vals))
    bad = frac > INT_TOL
    if not bad.any():
        return None
    cand = int_cols[bad]
    dist = np.abs((x[cand] - np.floor(x[cand])) - 0.5)
    order = np.lexsort((cand, dist))
    return int(cand[order[0]])


def _dive_heuristic(node_solve, pre, root, int_cols, rounds: int = 6, base=None):
    """Ceil-diving for an incumbent.

    Repeatedly fixes the fractional integer columns at the ceiling of
    their LP values and re-solves; rounding vehicle counts up keeps
    capacity rows satisfiable, so a feasible incumbent usually appears
    within a few rounds. ``base`` seeds the dive with a node's bound
    changes.
    """
    if int_cols.size == 0:
        return None
    changes: dict = dict(base) if base else {}
    res = root
    for _ in range(rounds):
        frac_cols = []
        for j in int_cols:
            if abs(res.x[j] - round(res.x[j])) <= INT_TOL:
                continue
            lo, hi = changes.get(int(j), (pre.lb[j], pre.ub[j]))
            if hi - lo <= 1e-12:
                continue
            frac_cols.append((int(j), lo, hi))
        if not frac_cols:
            break
        for j, lo, hi in frac_cols:
            v = float(np.ceil(res.x[j] - INT_TOL))
            changes[j] = (min(max(v, lo), hi),) * 2
        res = node_solve(changes)
        if res.status != "optimal":
            return None
        if _fractional(res.x, int_cols) is None:
            return res.obj, res.x.copy()
    if res is not root and res.status == "optimal" and _fractional(res.x, int_cols) is None:
        return res.obj, res.x.copy()
    return None


def check_dimensions(model: MILPModel, values) -> np.ndarray:
    x = np.asarray(values, dtype=float)
    if x.shape != (model.n_cols,):
        raise DimensionMismatch(
            f"solution has shape {x.shape}, model has {model.n_cols} columns"
        )
    return x

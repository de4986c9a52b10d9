"""Build, solve and compare the three fidelities on one scenario.

Gap percentages follow the mission-cost-error convention: (J - J_fs) / J_fs.
The bound ordering J_mf <= J_fs <= J_pf is asserted over the members that
solved to proven optimality; infeasible members mark their checks not
applicable instead of failing the run.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .. import packing
from ..formulation import (
    MILPModel,
    Solution,
    build_full_size,
    build_prefixed,
    derive_prefixed_ratios,
    model_stats,
)
from .adapters import ReferenceAdapter
from .branch_bound import SolveLimits

ORDER_TOL = 1e-6

PREFIXED = "prefixed"
FULL_SIZE = "full-size"
MULTI_FIDELITY = "multi-fidelity"


@dataclass
class FidelityResult:
    fidelity: str
    status: str
    objective: float | None
    gap_vs_full: float | None  # (J - J_fs) / J_fs
    rows: int
    cols: int
    int_cols: int
    nonzeros: int
    build_seconds: float
    solve_seconds: float
    bound: float | None = None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class ComparisonReport:
    scenario: str
    solver: str
    results: list[FidelityResult]
    ordering_ok: bool | None  # None: not applicable (too few optima)
    ordering_detail: str
    packing_summary: dict
    tolerance: float = ORDER_TOL

    def result(self, fidelity: str) -> FidelityResult:
        for r in self.results:
            if r.fidelity == fidelity:
                return r
        raise KeyError(fidelity)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "solver": self.solver,
            "tolerance": self.tolerance,
            "ordering_ok": self.ordering_ok,
            "ordering_detail": self.ordering_detail,
            "packing_summary": self.packing_summary,
            "results": [r.to_dict() for r in self.results],
        }


def compare_fidelities(
    scenario,
    adapter=None,
    limits: SolveLimits | None = None,
    keep_solutions: bool = False,
):
    """Run the three-formulation comparison; returns (report, artifacts).

    ``artifacts`` maps fidelity name to (model, solution) when
    ``keep_solutions`` is set, else stays empty.
    """
    adapter = adapter or ReferenceAdapter()
    limits = limits or SolveLimits()
    artifacts: dict[str, tuple[MILPModel, Solution]] = {}
    results: list[FidelityResult] = []

    t0 = time.monotonic()
    full = build_full_size(scenario)
    t_full_build = time.monotonic() - t0

    t0 = time.monotonic()
    plan, multi = packing.pack_model(full, scenario)
    t_multi_build = time.monotonic() - t0

    t0 = time.monotonic()
    ratios = derive_prefixed_ratios(scenario)
    prefixed = build_prefixed(scenario, ratios)
    t_pre_build = time.monotonic() - t0

    solutions: dict[str, Solution] = {}
    for fidelity, model, t_build in (
        (PREFIXED, prefixed, t_pre_build),
        (FULL_SIZE, full, t_full_build),
        (MULTI_FIDELITY, multi, t_multi_build),
    ):
        sol = adapter.solve(model, limits)
        solutions[fidelity] = sol
        rows, cols, ints, nnz = model_stats(model)
        results.append(
            FidelityResult(
                fidelity=fidelity,
                status=sol.status,
                objective=sol.objective,
                gap_vs_full=None,
                rows=rows,
                cols=cols,
                int_cols=ints,
                nonzeros=nnz,
                build_seconds=t_build,
                solve_seconds=sol.wall_seconds,
                bound=sol.bound,
            )
        )
        if keep_solutions:
            artifacts[fidelity] = (model, sol)

    j_fs = solutions[FULL_SIZE].objective
    if solutions[FULL_SIZE].status == "optimal" and j_fs:
        for r in results:
            if r.objective is not None and r.status == "optimal":
                r.gap_vs_full = (r.objective - j_fs) / j_fs

    ordering_ok, detail = _check_ordering(solutions)
    report = ComparisonReport(
        scenario=getattr(scenario, "name", "scenario"),
        solver=adapter.name,
        results=results,
        ordering_ok=ordering_ok,
        ordering_detail=detail,
        packing_summary=plan.summary(),
    )
    return report, artifacts


def _check_ordering(solutions) -> tuple[bool | None, str]:
    def opt(f):
        s = solutions[f]
        return s.objective if s.status == "optimal" else None

    j_mf, j_fs, j_pf = opt(MULTI_FIDELITY), opt(FULL_SIZE), opt(PREFIXED)
    checks = []
    if j_mf is not None and j_fs is not None:
        checks.append(("J_mf <= J_fs", j_mf <= j_fs + ORDER_TOL * max(1.0, abs(j_fs))))
    if j_fs is not None and j_pf is not None:
        checks.append(("J_fs <= J_pf", j_fs <= j_pf + ORDER_TOL * max(1.0, abs(j_pf))))
    skipped = [
        f for f in (PREFIXED, FULL_SIZE, MULTI_FIDELITY) if solutions[f].status != "optimal"
    ]
    if not checks:
        return None, "not applicable: " + ", ".join(
            f"{f}={solutions[f].status}" for f in skipped
        )
    ok = all(passed for _, passed in checks)
    parts = [f"{name}: {'ok' if passed else 'VIOLATED'}" for name, passed in checks]
    if skipped:
        parts.append("skipped: " + ", ".join(f"{f}={solutions[f].status}" for f in skipped))
    return ok, "; ".join(parts)

"""Independent feasibility checking.

The checker re-derives the coefficient arrays through the model's rebuild
hook (re-running the original constructors) rather than trusting whatever
copy the solver consumed, then evaluates A x - b, bound and integrality
violations row by row.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch
from ..formulation import MILPModel, Solution


@dataclass(frozen=True)
class FeasibilityReport:
    max_row_violation: float
    max_integrality_violation: float
    max_bound_violation: float
    tolerance: float
    worst_row: str | None = None

    @property
    def verdict(self) -> bool:
        return (
            self.max_row_violation <= self.tolerance
            and self.max_integrality_violation <= self.tolerance
            and self.max_bound_violation <= self.tolerance
        )


def check_solution(model: MILPModel, solution, tol: float = 1e-6) -> FeasibilityReport:
    """Verify a solution against freshly re-derived coefficients."""
    if isinstance(solution, Solution):
        values = solution.values
    else:
        values = solution
    x = np.asarray(values, dtype=float)
    if x.shape != (model.n_cols,):
        raise DimensionMismatch(
            f"solution has shape {x.shape}, model expects ({model.n_cols},)"
        )
    rebuild = model.provenance.get("rebuild")
    ref = rebuild() if rebuild is not None else model
    if ref.n_cols != model.n_cols or ref.n_rows != model.n_rows:
        raise DimensionMismatch("rebuilt model shape differs from solved model")

    activity = np.zeros(ref.n_rows)
    np.add.at(activity, ref.a_rows, ref.a_vals * x[ref.a_cols])
    row_viol = activity - ref.rhs
    worst = None
    max_row = 0.0
    if ref.n_rows:
        i = int(np.argmax(row_viol))
        max_row = max(0.0, float(row_viol[i]))
        if max_row > tol:
            worst = ref.row_name(i)

    bound_viol = np.maximum(ref.lb - x, x - ref.ub)
    max_bound = max(0.0, float(bound_viol.max())) if ref.n_cols else 0.0

    ints = np.nonzero(ref.integer)[0]
    max_int = 0.0
    if ints.size:
        max_int = float(np.abs(x[ints] - np.round(x[ints])).max())

    return FeasibilityReport(
        max_row_violation=max_row,
        max_integrality_violation=max_int,
        max_bound_violation=max_bound,
        tolerance=tol,
        worst_row=worst,
    )

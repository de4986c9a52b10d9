"""Solver layer: bounded-variable simplex, branch and bound, MPS export,
independent feasibility checking, and the three-fidelity comparison runner."""

from .simplex import BoundedSimplex, SimplexResult
from .branch_bound import SolveLimits, solve_reference
from .mps import export_mps, parse_mps
from .verify import FeasibilityReport, check_solution
from .adapters import ReferenceAdapter, ExternalProcessAdapter, discover_adapter
from .compare import ComparisonReport, FidelityResult, compare_fidelities

__all__ = [
    "BoundedSimplex",
    "SimplexResult",
    "SolveLimits",
    "solve_reference",
    "export_mps",
    "parse_mps",
    "FeasibilityReport",
    "check_solution",
    "ReferenceAdapter",
    "ExternalProcessAdapter",
    "discover_adapter",
    "ComparisonReport",
    "FidelityResult",
    "compare_fidelities",
]

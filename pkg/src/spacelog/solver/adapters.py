"""Solving contract: the bundled reference solver plus an external-process
adapter discovered through the SPACELOG_EXT_SOLVER environment variable.

External protocol: the executable receives one argument (an MPS path) and
prints ``STATUS <optimal|infeasible|unbounded|limit>``, ``OBJ <value>``,
then ``VAR <name> <value>`` lines for nonzero variables.
"""

from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
import time

import numpy as np

from ..formulation import MILPModel, Solution
from .branch_bound import SolveLimits, solve_reference
from .mps import export_mps

ENV_VAR = "SPACELOG_EXT_SOLVER"


class ReferenceAdapter:
    """Bundled exact solver: deterministic, LP + MILP, desk scale."""

    name = "reference"
    capabilities = "milp"
    deterministic = True
    concurrent_safe = True

    def solve(self, model: MILPModel, limits: SolveLimits | None = None) -> Solution:
        t0 = time.monotonic()
        sol = solve_reference(model, limits)
        sol.wall_seconds = time.monotonic() - t0
        return sol


class ExternalProcessAdapter:
    """Runs an external executable against an exported MPS file."""

    capabilities = "milp"
    deterministic = False
    concurrent_safe = False

    def __init__(self, executable: str):
        # the command may carry arguments, e.g. "python -m spacelog.solver.highs_cli"
        self.command = shlex.split(executable)
        self.executable = executable
        self.name = f"external:{os.path.basename(self.command[-1])}"

    def solve(self, model: MILPModel, limits: SolveLimits | None = None) -> Solution:
        limits = limits or SolveLimits()
        t0 = time.monotonic()
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "model.mps")
            export_mps(model, path)
            proc = subprocess.run(
                self.command + [path],
                capture_output=True,
                text=True,
                timeout=limits.max_seconds,
            )
        wall = time.monotonic() - t0
        status, obj, values = self._parse(proc.stdout, model)
        return Solution(status, obj, values, wall_seconds=wall)

    @staticmethod
    def _parse(stdout: str, model: MILPModel):
        status = "limit"
        obj = None
        name_to_col = {model.col_name(j): j for j in range(model.n_cols)}
        values = np.zeros(model.n_cols)
        seen_vars = False
        for line in stdout.splitlines():
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "STATUS" and len(parts) > 1:
                status = parts[1]
            elif parts[0] == "OBJ" and len(parts) > 1:
                obj = float(parts[1])
            elif parts[0] == "VAR" and len(parts) > 2:
                seen_vars = True
                j = name_to_col.get(parts[1])
                if j is not None:
                    values[j] = float(parts[2])
        if status != "optimal":
            return status, obj, None
        return status, obj, values if seen_vars else None


def discover_adapter(explicit: str | None = None):
    """External adapter from an explicit path or the environment, the
    bundled reference solver otherwise."""
    path = explicit or os.environ.get(ENV_VAR)
    if path:
        return ExternalProcessAdapter(path)
    return ReferenceAdapter()

"""External-solver shim speaking the spacelog text protocol.

Reads one MPS path from argv, solves with HiGHS through scipy, prints::

    STATUS <optimal|infeasible|unbounded|limit>
    OBJ <value>
    VAR <name> <value>

Install scipy to use it; declared as an optional extra. Point the
SPACELOG_EXT_SOLVER environment variable at this script (or at
``python -m spacelog.solver.highs_cli``) to route solves through HiGHS.
"""

from __future__ import annotations

import sys

import numpy as np

from .mps import parse_mps


def main(argv=None) -> int:
    argv = argv if argv is not None else sys.argv[1:]
    if len(argv) != 1:
        print("usage: spacelog-highs <model.mps>", file=sys.stderr)
        return 2
    try:
        from scipy import sparse
        from scipy.optimize import Bounds, LinearConstraint, milp
    except ImportError:
        print("STATUS limit")
        print("scipy not installed", file=sys.stderr)
        return 3

    model = parse_mps(argv[0])
    if model.n_rows:
        A = sparse.coo_matrix(
            (model.a_vals, (model.a_rows, model.a_cols)),
            shape=(model.n_rows, model.n_cols),
        ).tocsc()
        constraints = LinearConstraint(A, -np.inf, model.rhs)
    else:
        constraints = ()
    res = milp(
        c=model.obj,
        constraints=constraints,
        bounds=Bounds(model.lb, model.ub),
        integrality=model.integer.astype(int),
        options={"mip_rel_gap": 1e-9},
    )
    if res.status == 0:
        print("STATUS optimal")
        print(f"OBJ {res.fun:.17g}")
        for j in range(model.n_cols):
            v = float(res.x[j])
            if v != 0.0:
                print(f"VAR {model.col_name(j)} {v:.17g}")
    elif res.status == 2:
        print("STATUS infeasible")
    elif res.status == 3:
        print("STATUS unbounded")
    else:
        print("STATUS limit")
    return 0


if __name__ == "__main__":
    sys.exit(main())

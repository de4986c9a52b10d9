"""Free-format MPS writer and a matching reader.

The writer emits N/L rows, COLUMNS with INTORG/INTEND markers, RHS and
BOUNDS (UP for finite upper bounds, PL for integer columns so readers do
not assume binary defaults, LO for positive lower bounds). Values carry 17
significant digits so float64 round-trips exactly; export -> parse ->
export is byte-identical.
"""

from __future__ import annotations

import os
import tempfile

import numpy as np

from ..errors import IoFailure, ParseError
from ..formulation import ColumnMeta, MILPModel, RowMeta

_SAFE = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789._+-[]")


def _sanitize(name: str) -> str:
    return "".join(ch if ch in _SAFE else "_" for ch in name)


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def export_mps(model: MILPModel, destination) -> None:
    """Write the model; atomic (temp file + rename)."""
    text = render_mps(model)
    directory = os.path.dirname(os.path.abspath(destination)) or "."
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, suffix=".mps.tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, destination)
    except OSError as exc:
        raise IoFailure(f"cannot write {destination}: {exc}") from exc


def render_mps(model: MILPModel) -> str:
    n, m = model.n_cols, model.n_rows
    col_names = [_sanitize(model.col_name(j)) for j in range(n)]
    row_names = [_sanitize(model.row_name(i)) for i in range(m)]

    by_col: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    order = np.lexsort((model.a_rows, model.a_cols))
    for idx in order:
        r = int(model.a_rows[idx])
        c = int(model.a_cols[idx])
        v = float(model.a_vals[idx])
        if v != 0.0:
            if by_col[c] and by_col[c][-1][0] == r:
                by_col[c][-1] = (r, by_col[c][-1][1] + v)
            else:
                by_col[c].append((r, v))

    lines = [f"NAME {model.provenance.get('name', 'spacelog')}"]
    lines.append("ROWS")
    lines.append(" N COST")
    for name in row_names:
        lines.append(f" L {name}")
    lines.append("COLUMNS")
    in_int = False
    marker = 0
    for j in range(n):
        if model.integer[j] and not in_int:
            lines.append(f" M{marker} 'MARKER' 'INTORG'")
            marker += 1
            in_int = True
        elif not model.integer[j] and in_int:
            lines.append(f" M{marker} 'MARKER' 'INTEND'")
            marker += 1
            in_int = False
        if model.obj[j] != 0.0:
            lines.append(f" {col_names[j]} COST {_fmt(float(model.obj[j]))}")
        for r, v in by_col[j]:
            lines.append(f" {col_names[j]} {row_names[r]} {_fmt(v)}")
        if model.obj[j] == 0.0 and not by_col[j]:
            # keep empty columns representable
            lines.append(f" {col_names[j]} COST 0")
    if in_int:
        lines.append(f" M{marker} 'MARKER' 'INTEND'")
    lines.append("RHS")
    for i in range(m):
        if model.rhs[i] != 0.0:
            lines.append(f" RHS {row_names[i]} {_fmt(float(model.rhs[i]))}")
    lines.append("BOUNDS")
    for j in range(n):
        if model.lb[j] != 0.0:
            lines.append(f" LO BND {col_names[j]} {_fmt(float(model.lb[j]))}")
        if np.isfinite(model.ub[j]):
            lines.append(f" UP BND {col_names[j]} {_fmt(float(model.ub[j]))}")
        elif model.integer[j]:
            lines.append(f" PL BND {col_names[j]}")
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def parse_mps(source) -> MILPModel:
    """Read a model written by :func:`export_mps` (N/L rows only)."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        try:
            with open(source) as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read {source}: {exc}") from exc

    section = None
    name = "spacelog"
    obj_row = None
    row_order: list[str] = []
    row_index: dict[str, int] = {}
    col_order: list[str] = []
    col_index: dict[str, int] = {}
    obj: dict[int, float] = {}
    entries: list[tuple[int, int, float]] = []
    rhs: dict[int, float] = {}
    lo: dict[int, float] = {}
    up: dict[int, float] = {}
    integer: set[int] = set()
    in_int = False

    def col_of(cname: str) -> int:
        if cname not in col_index:
            col_index[cname] = len(col_order)
            col_order.append(cname)
            if in_int:
                integer.add(col_index[cname])
        return col_index[cname]

    for raw in text.splitlines():
        line = raw.rstrip()
        if not line or line.startswith("*"):
            continue
        upper = line.strip().upper()
        if upper.startswith("NAME"):
            parts = line.split()
            if len(parts) > 1:
                name = parts[1]
            continue
        if upper in ("ROWS", "COLUMNS", "RHS", "BOUNDS", "RANGES", "ENDATA"):
            section = upper
            if section == "RANGES":
                raise ParseError("RANGES sections are not supported")
            continue
        parts = line.split()
        if section == "ROWS":
            sense, rname = parts[0].upper(), parts[1]
            if sense == "N":
                obj_row = rname
            elif sense == "L":
                row_index[rname] = len(row_order)
                row_order.append(rname)
            else:
                raise ParseError(f"unsupported row sense {sense!r}")
        elif section == "COLUMNS":
            if len(parts) >= 3 and parts[1] == "'MARKER'":
                in_int = parts[2] == "'INTORG'"
                continue
            cname = parts[0]
            j = col_of(cname)
            for k in range(1, len(parts) - 1, 2):
                rname, val = parts[k], float(parts[k + 1])
                if rname == obj_row:
                    obj[j] = obj.get(j, 0.0) + val
                else:
                    if rname not in row_index:
                        raise ParseError(f"unknown row {rname!r}")
                    if val != 0.0:
                        entries.append((row_index[rname], j, val))
        elif section == "RHS":
            for k in range(1, len(parts) - 1, 2):
                rname, val = parts[k], float(parts[k + 1])
                if rname not in row_index:
                    raise ParseError(f"unknown rhs row {rname!r}")
                rhs[row_index[rname]] = val
        elif section == "BOUNDS":
            btype = parts[0].upper()
            cname = parts[2]
            if cname not in col_index:
                raise ParseError(f"bound on unknown column {cname!r}")
            j = col_index[cname]
            if btype == "UP":
                up[j] = float(parts[3])
            elif btype == "LO":
                lo[j] = float(parts[3])
            elif btype == "FX":
                lo[j] = up[j] = float(parts[3])
            elif btype == "PL":
                up[j] = np.inf
            elif btype == "BV":
                lo[j], up[j] = 0.0, 1.0
                integer.add(j)
            else:
                raise ParseError(f"unsupported bound type {btype!r}")

    n = len(col_order)
    m = len(row_order)
    model = MILPModel(
        [obj.get(j, 0.0) for j in range(n)],
        [e[0] for e in entries],
        [e[1] for e in entries],
        [e[2] for e in entries],
        [rhs.get(i, 0.0) for i in range(m)],
        [lo.get(j, 0.0) for j in range(n)],
        [up.get(j, np.inf) for j in range(n)],
        [j in integer for j in range(n)],
        [ColumnMeta(arc_index=-1, commodity=col_order[j]) for j in range(n)],
        [RowMeta("imported", label=row_order[i]) for i in range(m)],
        provenance={"name": name},
    )
    model.provenance["explicit_names"] = (list(col_order), list(row_order))
    return model

"""Comparison reports and flow ledgers: structured JSON plus fixed-width
tables following the mission-cost / cost-error / time / time-reduction
column layout."""

from __future__ import annotations

import json

import numpy as np

from ..errors import IoFailure, ParseError
from ..formulation import MILPModel, Solution
from ..solver.compare import ComparisonReport, FidelityResult
from .schema import _atomic_write

LEDGER_TOL = 1e-9


def comparison_report_to_dict(report: ComparisonReport) -> dict:
    return report.to_dict()


def comparison_report_from_dict(d: dict) -> ComparisonReport:
    try:
        results = [FidelityResult(**r) for r in d["results"]]
        return ComparisonReport(
            scenario=d["scenario"],
            solver=d["solver"],
            results=results,
            ordering_ok=d["ordering_ok"],
            ordering_detail=d["ordering_detail"],
            packing_summary=d["packing_summary"],
            tolerance=d.get("tolerance", 1e-6),
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed report document: {exc!r}") from exc


def render_table(report: ComparisonReport) -> str:
    """Human-readable table: formulation, mission cost, cost error %,
    solve time, time reduction % (relative to the full-size baseline)."""
    full = report.result("full-size")
    base_time = full.solve_seconds
    header = (
        f"{'Formulation':<16} {'Mission cost (IMLEO), kg':>26} "
        f"{'Cost error':>11} {'Time, s':>9} {'Time reduction':>15}"
    )
    lines = [f"scenario: {report.scenario}", f"solver:   {report.solver}", "", header]
    lines.append("-" * len(header))
    for r in report.results:
        cost = f"{r.objective:,.1f}" if r.objective is not None else r.status
        gap = f"{100 * r.gap_vs_full:+.1f}%" if r.gap_vs_full is not None else "--"
        if r.fidelity == "full-size":
            gap = "--"
            red = "--"
        elif base_time > 0:
            red = f"{100 * (r.solve_seconds - base_time) / base_time:+.1f}%"
        else:
            red = "--"
        lines.append(
            f"{r.fidelity:<16} {cost:>26} {gap:>11} {r.solve_seconds:>9.2f} {red:>15}"
        )
    lines.append("")
    verdict = {True: "PASS", False: "FAIL", None: "N/A"}[report.ordering_ok]
    lines.append(f"bound ordering (J_mf <= J_fs <= J_pf): {verdict}")
    lines.append(f"  {report.ordering_detail}")
    ps = report.packing_summary
    lines.append(
        f"packing: {ps.get('arcs_packed', 0)} arcs packed, "
        f"{ps.get('columns_removed', 0)} columns removed"
    )
    return "\n".join(lines) + "\n"


def write_report(report: ComparisonReport, fmt: str, path) -> None:
    """Write the report as JSON or as the fixed-width table."""
    if fmt == "json":
        _atomic_write(path, json.dumps(report.to_dict(), indent=2, sort_keys=True))
    elif fmt == "table":
        _atomic_write(path, render_table(report))
    else:
        raise IoFailure(f"unknown report format {fmt!r}")


def load_report(path) -> ComparisonReport:
    try:
        with open(path) as fh:
            return comparison_report_from_dict(json.load(fh))
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"cannot parse {path}: {exc}") from exc


def build_flow_ledger(model: MILPModel, solution: Solution, scenario) -> dict:
    """Reconstruct shipped masses, node inventories and infrastructure
    sizing from a solved model without re-solving.

    Package columns report package totals; the split across members on a
    transport arc is undefined by construction and labeled as such.
    """
    graph = scenario.expanded()
    flows = []
    inventory: dict[tuple[str, int], dict[str, float]] = {}
    infra_peak: dict[str, float] = {}
    infra_categories = {"infrastructure-subsystem", "power", "energy-storage"}
    cat_of = {c.id: c.category for c in scenario.space}
    values = solution.values if solution.values is not None else np.zeros(model.n_cols)
    for j, v in enumerate(values):
        if abs(v) <= LEDGER_TOL:
            continue
        meta = model.col_meta[j]
        arc = graph.arcs[meta.arc_index]
        label = meta.label
        entry = {
            "vehicle": arc.vehicle,
            "from": arc.from_node,
            "to": arc.to_node,
            "depart_step": arc.depart_step,
            "commodity": label,
            "amount": float(v),
        }
        if meta.package is not None:
            entry["package_split"] = "undefined (packed in transit)"
        flows.append(entry)
        if arc.is_holdover:
            inv = inventory.setdefault((arc.from_node, arc.depart_step), {})
            inv[label] = inv.get(label, 0.0) + float(v)
            if (
                meta.commodity is not None
                and cat_of.get(meta.commodity) in infra_categories
                and arc.from_node in scenario.isru_nodes
            ):
                infra_peak[meta.commodity] = max(
                    infra_peak.get(meta.commodity, 0.0), float(v)
                )
    return {
        "objective": solution.objective,
        "status": solution.status,
        "flows": flows,
        "inventory": [
            {"node": n, "step": t, "holdings": h}
            for (n, t), h in sorted(inventory.items())
        ],
        "infrastructure_sizing_kg": dict(sorted(infra_peak.items())),
    }


def write_flow_ledger(ledger: dict, path) -> None:
    _atomic_write(path, json.dumps(ledger, indent=2, sort_keys=True))

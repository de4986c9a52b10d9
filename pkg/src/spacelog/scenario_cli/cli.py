"""Command line: validate scenarios, build/export models, run the packing
preprocessor, solve a single fidelity, or run the full three-way compare.

Exit status is nonzero when validation fails, a build fails, or the bound
ordering check is violated.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .. import packing
from ..errors import SpacelogError, ValidationError
from ..formulation import (
    build_full_size,
    build_multifidelity,
    build_prefixed,
    derive_prefixed_ratios,
    model_stats,
)
from ..solver import SolveLimits, check_solution, discover_adapter, export_mps
from ..solver.compare import compare_fidelities
from .lunar import bundled_lunar_scenario
from .reports import (
    build_flow_ledger,
    load_report,
    render_table,
    write_flow_ledger,
    write_report,
)
from .schema import _atomic_write, load_scenario, save_scenario

FIDELITIES = ("prefixed", "full", "multi")


def _build(scenario, fidelity: str):
    if fidelity == "full":
        return build_full_size(scenario)
    if fidelity == "prefixed":
        return build_prefixed(scenario, derive_prefixed_ratios(scenario))
    if fidelity == "multi":
        full = build_full_size(scenario)
        plan, model = packing.pack_model(full, scenario)
        return model
    raise ValueError(fidelity)


def cmd_validate(args) -> int:
    scenario = load_scenario(args.scenario)
    graph = scenario.expanded()
    print(
        f"ok: {scenario.name}: {len(scenario.nodes)} nodes, "
        f"{len(scenario.vehicles)} vehicles, {len(scenario.space)} commodities, "
        f"{len(graph.arcs)} arcs"
    )
    cap = scenario.operations.supply_cap
    print(f"note: unlimited supplies are capped at {cap:g} kg per step")
    return 0


def cmd_build(args) -> int:
    scenario = load_scenario(args.scenario)
    model = _build(scenario, args.fidelity)
    rows, cols, ints, nnz = model_stats(model)
    print(f"{args.fidelity}: {rows} rows, {cols} cols, {ints} integer, {nnz} nonzeros")
    if args.mps:
        export_mps(model, args.mps)
        print(f"wrote {args.mps}")
    return 0


def cmd_pack(args) -> int:
    scenario = load_scenario(args.scenario)
    full = build_full_size(scenario)
    plan, packed = packing.pack_model(full, scenario)
    summary = plan.summary()
    print(json.dumps(summary, indent=2))
    if args.plan_out:
        doc = {
            "summary": summary,
            "commodities": list(plan.commodity_ids),
            "arcs": [
                {
                    "arc": list(ap.arc_key),
                    "sigma_cost": [list(g) for g in ap.sigma1],
                    "sigma_transformation": [list(g) for g in ap.sigma2],
                    "sigma_concurrency": [list(g) for g in ap.sigma3],
                    "intersection_sets": [list(g) for g in ap.packables.zeta],
                    "selected": [list(g) for g in ap.packables.zeta_selected],
                    "packed_groups": [list(g) for g in ap.packed_groups],
                    "G_shape": list(ap.aggregation.G.shape) if ap.aggregation else None,
                    "counts_N_L_K": list(ap.counts),
                }
                for ap in plan.arc_plans
            ],
            "skipped_arcs": [list(plan_skipped_key(full, plan, a)) for a in plan.skipped_arcs],
        }
        _atomic_write(args.plan_out, json.dumps(doc, indent=2))
        print(f"wrote {args.plan_out}")
    return 0


def plan_skipped_key(model, plan, arc_index):
    meta_arc = None
    scenario = model.provenance.get("scenario")
    if scenario is not None:
        meta_arc = scenario.expanded().arcs[arc_index].key()
    return meta_arc if meta_arc is not None else (arc_index,)


def cmd_solve(args) -> int:
    scenario = load_scenario(args.scenario)
    model = _build(scenario, args.fidelity)
    adapter = discover_adapter(args.ext_solver)
    limits = SolveLimits(max_seconds=args.limits_seconds)
    sol = adapter.solve(model, limits)
    print(f"status: {sol.status}")
    if sol.objective is not None:
        print(f"objective: {sol.objective:.6f}")
    if sol.status == "optimal" and sol.values is not None:
        report = check_solution(model, sol, tol=1e-6)
        print(f"feasibility check: {'pass' if report.verdict else 'FAIL'}")
        if args.ledger_out:
            write_flow_ledger(build_flow_ledger(model, sol, scenario), args.ledger_out)
            print(f"wrote {args.ledger_out}")
    if args.mps:
        export_mps(model, args.mps)
        print(f"wrote {args.mps}")
    return 0 if sol.status in ("optimal", "limit") else 1


def cmd_compare(args) -> int:
    scenario = load_scenario(args.scenario)
    adapter = discover_adapter(args.ext_solver)
    limits = SolveLimits(max_seconds=args.limits_seconds)
    report, artifacts = compare_fidelities(
        scenario, adapter, limits, keep_solutions=bool(args.out_dir)
    )
    print(render_table(report))
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        write_report(report, "json", os.path.join(args.out_dir, "comparison.json"))
        write_report(report, "table", os.path.join(args.out_dir, "comparison.txt"))
        for fidelity, (model, sol) in artifacts.items():
            if sol.values is not None:
                ledger = build_flow_ledger(model, sol, scenario)
                write_flow_ledger(
                    ledger, os.path.join(args.out_dir, f"ledger_{fidelity}.json")
                )
        print(f"wrote reports to {args.out_dir}")
    return 0 if report.ordering_ok in (True, None) else 2


def cmd_report(args) -> int:
    report = load_report(args.raw)
    if args.format == "table":
        text = render_table(report)
    else:
        text = json.dumps(report.to_dict(), indent=2, sort_keys=True)
    if args.out:
        _atomic_write(args.out, text)
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


def cmd_lunar(args) -> int:
    scenario = bundled_lunar_scenario(
        missions=args.missions,
        launch_interval=args.interval,
        isru_productivity=args.productivity,
        storage_scale=args.storage_scale,
        reduced=args.reduced,
    )
    save_scenario(scenario, args.out)
    print(f"wrote {args.out} ({scenario.name})")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spacelog",
        description="Campaign-planning MILPs for space logistics at three fidelities",
    )
    parser.add_argument("--limits-seconds", type=float, default=900.0)
    parser.add_argument("--seed", type=int, default=None, help="seed for fuzz utilities")
    parser.add_argument(
        "--ext-solver",
        default=None,
        help="external solver command (default: SPACELOG_EXT_SOLVER env var)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a scenario file")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("build", help="build one fidelity and optionally export MPS")
    p.add_argument("scenario")
    p.add_argument("--fidelity", choices=FIDELITIES, default="full")
    p.add_argument("--mps", default=None)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("pack", help="run the commodity-packing preprocessor")
    p.add_argument("scenario")
    p.add_argument("--plan-out", default=None)
    p.set_defaults(func=cmd_pack)

    p = sub.add_parser("solve", help="build and solve one fidelity")
    p.add_argument("scenario")
    p.add_argument("--fidelity", choices=FIDELITIES, default="full")
    p.add_argument("--mps", default=None)
    p.add_argument("--ledger-out", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("compare", help="run the three-fidelity comparison")
    p.add_argument("scenario")
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("report", help="render a stored comparison report")
    p.add_argument("raw")
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("lunar", help="emit the bundled lunar scenario")
    p.add_argument("--missions", type=int, default=3)
    p.add_argument("--interval", type=float, default=120.0)
    p.add_argument("--productivity", type=float, default=1.0)
    p.add_argument("--storage-scale", type=float, default=1.0)
    p.add_argument("--reduced", action="store_true")
    p.add_argument("--out", default="lunar_campaign.json")
    p.set_defaults(func=cmd_lunar)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print("validation failed:", file=sys.stderr)
        for diag in exc.diagnostics:
            print(f"  - {diag}", file=sys.stderr)
        return 1
    except SpacelogError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

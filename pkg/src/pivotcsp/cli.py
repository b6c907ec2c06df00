"""Command line front end.

Exit codes: 0 solved / all checks passed, 1 insoluble / a check failed,
2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .filtering import arc_consistency, directional_path_consistency, path_consistency, pivot_filter
from .generator import GeneratorParams, generate_instance
from .io import InstanceError, dumps_instance, load_instance, load_plan, save_instance
from .network import NetworkError, network_to_spec, network_stats
from .reports import run_compare, run_verify
from .solver import BudgetExceeded, brute_force_solve, solve_decomposed
from .structure import (
    StructureError,
    TieBreak,
    compute_pivot_plan,
    functional_subgraph,
    minimum_root_set,
    reduce,
    tarjan_scc,
)

EXIT_OK, EXIT_INSOLUBLE, EXIT_INPUT = 0, 1, 2


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # subcommands re-declare the flags without defaults so either position works
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--seed", type=int, default=default(0))
    parser.add_argument("--tie-break", choices=["lex", "seeded"], default=default("lex"))
    parser.add_argument("--output", choices=["text", "machine"], default=default("text"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pivotcsp", description=__doc__.splitlines()[0])
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", parents=[common], help="write a random instance")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--d", type=int, required=True)
    gen.add_argument("--functional-arcs", type=int, default=0)
    gen.add_argument("--cycle-fraction", type=float, default=0.0)
    gen.add_argument("--other-constraints", type=int, default=0)
    gen.add_argument("--tightness", type=float, default=0.5)
    gen.add_argument("--partial-fraction", type=float, default=0.0)
    gen.add_argument("-o", "--out")

    for name, text in [("analyze", "root set, pivot candidates and ordering"),
                       ("filter", "filter an instance"),
                       ("solve", "solve by decomposition"),
                       ("verify", "check root set, ordering and pivot consistency"),
                       ("compare", "compare pivot, AC, PC and DPC filtering")]:
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("instance")
        if name in ("filter", "verify", "compare"):
            p.add_argument("--plan", help="plan file (roots, ordering, pivots)")
        if name == "filter":
            p.add_argument("--method", choices=["pivot", "ac", "pc", "dpc"], default="pivot")
            p.add_argument("-o", "--out", help="write the filtered instance here")
        if name == "solve":
            p.add_argument("--mode", choices=["first", "all", "count"], default="all")
            p.add_argument("--oracle", action="store_true",
                           help="cross-check against brute-force enumeration")
            p.add_argument("--report", help="write the machine-readable report here")
        if name == "verify":
            p.add_argument("--filter", action="store_true",
                           help="apply pivot filtering before checking")
    return parser


def _emit(args, text: str, data) -> None:
    if args.output == "machine":
        print(json.dumps(data, indent=2, ensure_ascii=False, default=str))
    else:
        print(text)


def _plan_for(net, args):
    if getattr(args, "plan", None):
        return load_plan(args.plan)
    tb = TieBreak(args.tie_break, args.seed)
    return compute_pivot_plan(net, minimum_root_set(net, tb), tb)


def cmd_generate(args) -> int:
    params = GeneratorParams(args.n, args.d, args.functional_arcs, args.cycle_fraction,
                             args.other_constraints, args.tightness, args.partial_fraction,
                             args.seed)
    net = generate_instance(params)
    if args.out:
        save_instance(net, args.out)
    else:
        print(dumps_instance(net))
    return EXIT_OK


def cmd_analyze(args) -> int:
    net = load_instance(args.instance)
    tb = TieBreak(args.tie_break, args.seed)
    g = functional_subgraph(net)
    scc = tarjan_scc(g)
    roots = minimum_root_set(net, tb)
    plan = compute_pivot_plan(net, roots, tb)
    stats = network_stats(net, roots)
    data = {
        "roots": list(roots.members),
        "r": roots.r,
        "pivot_candidates": [list(a) for a in plan.arcs()],
        "ordering": list(plan.ordering),
        "scc_sizes": sorted((len(c) for c in scc.components), reverse=True),
        "reduced_graph_sources": len(reduce(g, scc).sources()),
        "functional_arcs": [list(a) for a in g.named_arcs()],
        "stats": vars(stats),
    }
    text = "\n".join([
        f"n={stats.n} d={stats.d} e={stats.e} functional={stats.e_f} inside R={stats.e_R}",
        f"root set (r={roots.r}): {', '.join(roots)}",
        "pivot candidates: " + ", ".join(f"{o}->{t}" for o, t in plan.arcs()),
        "ordering: " + ", ".join(plan.ordering),
        "SCC sizes: " + " ".join(map(str, data["scc_sizes"])),
    ])
    _emit(args, text, data)
    return EXIT_OK


def cmd_filter(args) -> int:
    net = load_instance(args.instance)
    if args.method == "pivot":
        out, report = pivot_filter(net, _plan_for(net, args))
    elif args.method == "dpc":
        out, report = directional_path_consistency(net, _plan_for(net, args).ordering)
    elif args.method == "pc":
        out, report = path_consistency(net)
    else:
        out, report = arc_consistency(net)
    if args.out:
        save_instance(out, args.out)
    summary = report.summary()
    text = "\n".join(f"{k}: {v}" for k, v in summary.items())
    if not args.out and args.output == "text":
        text = dumps_instance(out) + "\n" + text
    _emit(args, text, {"report": report.to_dict(), "instance": network_to_spec(out)})
    return EXIT_INSOLUBLE if report.wiped_out else EXIT_OK


def cmd_solve(args) -> int:
    net = load_instance(args.instance)
    report = solve_decomposed(net, args.mode, TieBreak(args.tie_break, args.seed))
    data = report.to_dict(net)
    lines = [f"root set: {', '.join(report.roots)}",
             f"root instantiations: {report.root_instantiations_found}",
             f"solutions: {report.count}"]
    lines += ["  " + ", ".join(map(str, s)) for s in report.solutions]
    if args.oracle:
        try:
            oracle = brute_force_solve(net)
        except BudgetExceeded as exc:
            data["oracle"] = f"skipped: {exc}"
            lines.append(f"oracle skipped: {exc}")
        else:
            if args.mode == "all":
                agree = oracle == set(report.solutions)
            elif args.mode == "count":
                agree = len(oracle) == report.count
            else:
                agree = set(report.solutions) <= oracle and bool(oracle) == bool(report.solutions)
            data["oracle"] = {"solutions": len(oracle), "agrees": agree}
            lines.append(f"oracle: {len(oracle)} solutions, {'agrees' if agree else 'DISAGREES'}")
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(data, fh, indent=2, ensure_ascii=False, default=str)
    _emit(args, "\n".join(lines), data)
    return EXIT_OK if report.count else EXIT_INSOLUBLE


def cmd_verify(args) -> int:
    net = load_instance(args.instance)
    plan = _plan_for(net, args)
    if args.filter:
        net, _ = pivot_filter(net, plan)
    diags = run_verify(net, plan)
    _emit(args, "\n".join(d.line() for d in diags),
          [{"check": d.check, "passed": d.passed, "detail": d.detail} for d in diags])
    return EXIT_OK if all(d.passed for d in diags) else EXIT_INSOLUBLE


def cmd_compare(args) -> int:
    net = load_instance(args.instance)
    report = run_compare(net, _plan_for(net, args))
    _emit(args, report.table(), {m: r.summary() for m, r in report.reports.items()})
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "analyze": cmd_analyze,
    "filter": cmd_filter,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "compare": cmd_compare,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (InstanceError, NetworkError, StructureError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 positive verdict, 1 negative verdict, 2 input error,
3 enumeration budget or iteration limit reached.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .errors import (
    BudgetExceeded,
    GraphError,
    IterationLimitExceeded,
    LeaderSetError,
    NoSpanningTree,
)
from .graph_core import format_graph, laplacian, load_graph, spanning_tree_roots
from .leader_select import (
    DEFAULT_BUDGET,
    ZERO_TOL,
    LeaderSet,
    kalman_verdict,
    min_leader_bounds,
    minimal_leader_sets,
    pbh_verdict,
    slc_candidates,
)
from .regular_graphs import (
    regular_leader_lower_bound,
    regular_never_slc,
    regular_slc_by_agent1,
    regular_structural,
)
from .report import SCHEMA_VERSION, graph_summary, plan_dict, real, render_text, spectrum_table, to_json, verdict_dict
from .spectral import eigen_decompose, is_cyclic
from .structural import certify_by_random_weights, min_structural_leaders, structurally_controllable
from .weight_adjust import adjust_weights, verify_plan

EXIT_POSITIVE, EXIT_NEGATIVE, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3


def _agent_list(text: str) -> list[int]:
    try:
        return [int(a) for a in text.split(",") if a.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated agent ids, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=ZERO_TOL,
                        help="zero tolerance for eigenvector entries (default %(default)g)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomised certification")
    common.add_argument("--json", metavar="OUT", help="write the JSON report to OUT ('-' for stdout)")
    common.add_argument("--quiet", action="store_true", help="suppress the text report")

    p = argparse.ArgumentParser(prog="macontrol",
                                description="Controllability analysis of leader-follower networks.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="spectrum, single-leader and structural summary")
    a.add_argument("graph")

    lead = sub.add_parser("leaders", parents=[common], help="minimum leader sets")
    lead.add_argument("graph")
    lead.add_argument("--require", type=_agent_list, default=[], metavar="A,B",
                      help="agents that must be leaders")
    lead.add_argument("--all", action="store_true", dest="enumerate_all",
                      help="list every minimum set instead of the first")
    lead.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                      help="maximum number of candidate sets to examine")

    s = sub.add_parser("structural", parents=[common], help="topology-only verdict for a leader set")
    s.add_argument("graph")
    s.add_argument("--leaders", type=_agent_list, required=True, metavar="A,B")
    s.add_argument("--certify", type=int, metavar="TRIALS",
                   help="search TRIALS random weightings for a controllable one")

    adj = sub.add_parser("adjust", parents=[common], help="reweight edges for single-leader control")
    adj.add_argument("graph")
    adj.add_argument("--theta", type=float, default=0.1, help="initial weight increment")
    adj.add_argument("--root", type=int, help="use this leader instead of choosing one")
    adj.add_argument("--max-iterations", type=int, default=200)

    r = sub.add_parser("regular", parents=[common], help="walk-count tests for in-degree regular graphs")
    r.add_argument("graph")
    return p


def _cross_check(L, spec, leaders, tol, diagnostics):
    k = kalman_verdict(L, list(leaders))
    p = pbh_verdict(L, list(leaders), spec, tol)
    if k.controllable != p.controllable:
        diagnostics.append(
            f"leaders {list(leaders)}: eigenvector test says {p.controllable}, "
            f"rank test says {k.controllable} (rank {k.rank})"
        )
    return k


def cmd_analyze(g, args, diagnostics):
    L = laplacian(g)
    spec = eigen_decompose(L)
    candidates = sorted(slc_candidates(L, spec, args.tol))
    for i in range(1, g.n + 1):
        _cross_check(L, spec, [i], args.tol, diagnostics)
    lower, upper = min_leader_bounds(spec)
    count, witness = min_structural_leaders(g)
    slc = bool(candidates)
    results = {
        "cyclic": is_cyclic(spec),
        "single_leader_controllable": slc,
        "slc_candidates": candidates,
        "leader_count_bounds": {"lower": lower, "upper": upper},
        "spanning_tree_roots": sorted(spanning_tree_roots(g)),
        "structural": {"min_leaders": count, "witness": list(witness)},
    }
    summary = ("single-leader controllable from " + ", ".join(map(str, candidates))
               if slc else "not single-leader controllable")
    return slc, summary, results, spectrum_table(spec)


def cmd_leaders(g, args, diagnostics):
    L = laplacian(g)
    spec = eigen_decompose(L)
    if args.require:
        LeaderSet.of(args.require, g.n)
    sets = minimal_leader_sets(L, spec, required_agents=args.require,
                               enumerate_all=args.enumerate_all, budget=args.budget, tol=args.tol)
    checked = []
    for s in sets:
        k = _cross_check(L, spec, s, args.tol, diagnostics)
        checked.append({"agents": list(s), "kalman": verdict_dict(k)})
    lower, upper = min_leader_bounds(spec)
    results = {
        "required": sorted(args.require),
        "enumerate_all": args.enumerate_all,
        "minimum_cardinality": len(sets[0]) if sets else None,
        "minimal_sets": checked,
        "leader_count_bounds": {"lower": lower, "upper": upper},
        "zero_tol": args.tol,
    }
    if sets:
        summary = f"minimum leader count {len(sets[0])}, e.g. {list(sets[0])}"
    else:
        summary = "no leader set found"
    return bool(sets), summary, results, spectrum_table(spec)


def cmd_structural(g, args, diagnostics):
    leaders = LeaderSet.of(args.leaders, g.n)
    ok = structurally_controllable(g, leaders)
    count, witness = min_structural_leaders(g)
    results = {
        "leaders": list(leaders),
        "structurally_controllable": ok,
        "min_leaders": count,
        "witness": list(witness),
    }
    positive = ok
    if args.certify is not None:
        weights = certify_by_random_weights(g, leaders, trials=args.certify, seed=args.seed)
        results["certification"] = {
            "trials": args.certify,
            "seed": args.seed,
            "found": weights is not None,
            "weights": None if weights is None else [
                {"src": s, "dst": d, "weight": w} for (s, d), w in sorted(weights.items())
            ],
        }
        if ok and weights is None:
            diagnostics.append(f"no controllable weighting found in {args.certify} trials")
        positive = weights is not None
    summary = ("structurally controllable" if ok else "not structurally controllable") \
        + f" from {list(leaders)}"
    return positive, summary, results, None


def _adjust_results(g, plan):
    h = plan.apply(g)
    L = laplacian(h)
    spec = eigen_decompose(L)
    rows = []
    for e in spec:
        w = e.left_basis[0]
        w = w / np.linalg.norm(w)
        rows.append({"value": e.value, "leader_entry": abs(w[plan.root - 1])})
    return {
        "plan": plan_dict(plan),
        "verification": verdict_dict(verify_plan(g, plan)),
        "adjusted_graph": format_graph(h),
        "adjusted_left_eigenvectors": rows,
    }, spectrum_table(spec)


def cmd_adjust(g, args, diagnostics):
    try:
        plan = adjust_weights(g, theta0=args.theta, max_iterations=args.max_iterations,
                              root=args.root)
    except NoSpanningTree as exc:
        return False, str(exc), {"plan": None}, None
    diagnostics.extend(plan.diagnostics)
    results, spec = _adjust_results(g, plan)
    if plan.adjusted_edges:
        edges = ", ".join(f"{e.src}->{e.dst}" for e in plan.adjusted_edges)
        summary = f"reweighting {edges} makes agent {plan.root} a single leader"
    else:
        summary = f"agent {plan.root} already controls the network"
    return True, summary, results, spec


def cmd_regular(g, args, diagnostics):
    slc = regular_slc_by_agent1(g)
    L = laplacian(g)
    k = kalman_verdict(L, [1])
    if k.controllable != slc:
        diagnostics.append(f"path-count test says {slc}, rank test says {k.controllable}")
    results = {
        "agent1_single_leader": slc,
        "never_single_leader": regular_never_slc(g),
        "leader_lower_bound": regular_leader_lower_bound(g),
        "structurally_controllable": regular_structural(g),
        "kalman_agent1": verdict_dict(k),
    }
    summary = "agent 1 controls the network alone" if slc else "agent 1 alone cannot control"
    return slc, summary, results, None


COMMANDS = {
    "analyze": cmd_analyze,
    "leaders": cmd_leaders,
    "structural": cmd_structural,
    "adjust": cmd_adjust,
    "regular": cmd_regular,
}


def _settings(args) -> dict:
    out = {"zero_tol": real(args.tol), "seed": args.seed}
    for name in ("theta", "root", "max_iterations", "budget", "certify"):
        if hasattr(args, name):
            out[name] = getattr(args, name)
    return out


def build_report(args, g) -> tuple[dict, int]:
    diagnostics: list[str] = []
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "macontrol", "version": __version__},
        "command": args.command,
        "settings": _settings(args),
        "graph": graph_summary(g),
    }
    try:
        positive, summary, results, spec = COMMANDS[args.command](g, args, diagnostics)
        code = EXIT_POSITIVE if positive else EXIT_NEGATIVE
    except BudgetExceeded as exc:
        positive, summary, results, spec = False, str(exc), {}, None
        code = EXIT_LIMIT
    except IterationLimitExceeded as exc:
        positive, summary, results, spec = False, str(exc), {}, None
        results["plan"] = plan_dict(exc.plan)
        diagnostics.extend(exc.plan.diagnostics)
        code = EXIT_LIMIT
    report["spectrum"] = spec
    report["results"] = results
    report["verdict"] = {"positive": positive, "summary": summary}
    report["diagnostics"] = diagnostics
    report["exit_code"] = code
    return report, code


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else 0
    try:
        g = load_graph(args.graph)
        report, code = build_report(args, g)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (GraphError, LeaderSetError) as exc:
        print(f"error: {args.graph}: {exc}", file=sys.stderr)
        return EXIT_INPUT

    text = to_json(report)
    if args.json == "-":
        sys.stdout.write(text)
    else:
        if args.json:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(text)
        if not args.quiet:
            sys.stdout.write(render_text(report))
    return code


def main():
    sys.exit(run())

"""Command line interface.

Subcommands:

  solve      solve a scenario file and optionally export the decision tree
  validate   parse a scenario file and report validation problems
  gen        generate a random scenario
  bench      run the benchmark harness over a parameter file
  serve      start the HTTP service
  lp-check   cross-check dynamic-programming scores against the LP

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 capacity or
timeout, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .bench import run_bench, write_csv
from .errors import (
    CapacityError,
    InternalCheckError,
    ScenarioError,
    SolveTimeoutError,
    TreesolveError,
)
from .export import export_tree
from .generator import GeneratorParams, generate_instance
from .graph import DEFAULT_NODE_CAP
from .lpcheck import check_against_dp
from .pipeline import solve, with_budget
from .scenario_io import load_scenario, parse_scenario, serialize_scenario
from .tree import TIE_BREAKS

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_CAPACITY = 3
EXIT_INTERNAL = 4

NODE_CAP_ENV = "TREESOLVE_NODE_CAP"


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits with code 1 on usage errors instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "%s: error: %s\n" % (self.prog, message))


def _node_cap(args) -> int:
    if args.node_cap is not None:
        return args.node_cap
    env = os.environ.get(NODE_CAP_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ScenarioError(
                "%s must be an integer, got %r" % (NODE_CAP_ENV, env), field=NODE_CAP_ENV
            )
    return DEFAULT_NODE_CAP


def _load(path: str):
    try:
        return load_scenario(path)
    except OSError as exc:
        raise ScenarioError("cannot read %s: %s" % (path, exc)) from exc


def _apply_budget(scn, budget_text):
    if budget_text is None:
        return scn
    try:
        budget = Fraction(budget_text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ScenarioError("invalid budget %r" % budget_text, field="budget") from exc
    return with_budget(scn, budget)


def _print_stats(stats, out=None):
    out = out if out is not None else sys.stdout
    print("score_root %.9f" % stats.score_root, file=out)
    print("n_full %d" % stats.n_full, file=out)
    print("n_reduced %d" % stats.n_reduced, file=out)
    print("n_tree %d" % stats.n_tree, file=out)
    if stats.n_rewarding_sets is not None:
        print("n_rewarding_sets %d" % stats.n_rewarding_sets, file=out)
        print("t_rewarding_s %.6f" % stats.t_rewarding, file=out)
    print("t_full_s %.6f" % stats.t_full, file=out)
    print("t_reduced_s %.6f" % stats.t_reduced, file=out)
    print("t_tree_s %.6f" % stats.t_tree, file=out)
    print("t_total_s %.6f" % stats.t_total, file=out)


def cmd_solve(args) -> int:
    scn = _apply_budget(_load(args.scenario), args.budget)
    result = solve(
        scn,
        naive=args.naive,
        tie_break=args.tie_break,
        seed=args.seed,
        queue_discipline=args.queue,
        node_cap=_node_cap(args),
        timeout=args.timeout,
    )
    print("score %s (raw %s)" % (float(result.score_normalized), float(result.score_raw)))
    if args.emit_stats:
        _print_stats(result.stats)
    if args.out is not None:
        fmt = args.format
        if fmt is None:
            fmt = "dot" if args.out.endswith(".dot") else "tree-json"
        text = export_tree(result.tree, scn, fmt)
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
        print("wrote %s (%s)" % (args.out, fmt))
    return EXIT_OK


def cmd_validate(args) -> int:
    _load(args.scenario)
    print("%s: ok" % args.scenario)
    return EXIT_OK


def cmd_gen(args) -> int:
    params = GeneratorParams(
        n_actions=args.n_actions,
        budget=args.budget,
        min_outcomes=args.min_outcomes,
        max_outcomes=args.max_outcomes,
        density=args.density,
        seed=args.seed,
    )
    scn = generate_instance(params)
    text = serialize_scenario(scn)
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
        print("wrote %s" % args.out)
    return EXIT_OK


def _bench_params(path: str) -> list[GeneratorParams]:
    try:
        with open(path, encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise ScenarioError("cannot read %s: %s" % (path, exc)) from exc
    except ValueError as exc:
        raise ScenarioError("%s is not valid JSON: %s" % (path, exc)) from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("instances"), list):
        raise ScenarioError(
            "params file must be an object with an 'instances' list", field="instances"
        )
    out = []
    for i, entry in enumerate(doc["instances"]):
        if not isinstance(entry, dict):
            raise ScenarioError("instances[%d] must be an object" % i, field="instances")
        try:
            out.append(GeneratorParams(**entry))
        except TypeError as exc:
            raise ScenarioError("instances[%d]: %s" % (i, exc), field="instances") from exc
    return out


def cmd_bench(args) -> int:
    instances = _bench_params(args.params)
    report = run_bench(
        instances,
        naive_max_states=args.naive_max_states,
        timeout=args.timeout,
        node_cap=_node_cap(args),
    )
    naive_csv = args.naive_csv
    if naive_csv is None and args.csv.endswith(".csv"):
        naive_csv = args.csv[: -len(".csv")] + "_naive.csv"
    write_csv(report, args.csv, naive_csv)
    print("wrote %s (%d rows)" % (args.csv, len(report.rows)))
    if naive_csv is not None:
        print("wrote %s (%d rows)" % (naive_csv, len(report.naive_rows)))
    slope = report.slope()
    if slope is not None:
        print("log-log slope %.4f" % slope)
    failures = sum(1 for row in report.rows if not row.ok)
    if failures:
        print("%d instance(s) failed" % failures, file=sys.stderr)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(node_cap=_node_cap(args))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def cmd_lp_check(args) -> int:
    scn = _apply_budget(_load(args.scenario), args.budget)
    result = solve(scn, naive=args.naive, node_cap=_node_cap(args), timeout=args.timeout)
    report = check_against_dp(result.full_graph, scn, backend=args.backend)
    print("states %d" % len(result.full_graph))
    print("max_score_diff %.3e" % report.max_score_diff)
    print("tight_set_mismatches %d" % len(report.mismatched_states))
    if report.ok:
        print("lp-check: ok")
        return EXIT_OK
    for key in report.mismatched_states[:10]:
        print("mismatch at state %s" % key, file=sys.stderr)
    print("lp-check: FAILED", file=sys.stderr)
    return EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="treesolve", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    def add_cap(p):
        p.add_argument(
            "--node-cap",
            type=int,
            default=None,
            help="abort once this many states are discovered (env %s)" % NODE_CAP_ENV,
        )

    def add_timeout(p):
        p.add_argument(
            "--timeout", type=float, default=None, help="per-solve wall clock limit in seconds"
        )

    p = sub.add_parser("solve", help="solve a scenario file")
    p.add_argument("scenario", help="path to a scenario JSON file")
    p.add_argument("--budget", default=None, help="override the scenario budget")
    p.add_argument("--naive", action="store_true", help="skip rewarding-set pruning")
    p.add_argument("--tie-break", choices=TIE_BREAKS, default="node-count")
    p.add_argument("--seed", type=int, default=None, help="seed for --tie-break random")
    p.add_argument("--out", default=None, help="write the tree to this path")
    p.add_argument(
        "--format",
        choices=("tree-json", "dot"),
        default=None,
        help="tree output format (default: by --out extension)",
    )
    p.add_argument("--emit-stats", action="store_true", help="print node counts and timings")
    p.add_argument("--queue", choices=("lifo", "fifo"), default="lifo")
    add_cap(p)
    add_timeout(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("validate", help="check a scenario file")
    p.add_argument("scenario", help="path to a scenario JSON file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("gen", help="generate a random scenario")
    p.add_argument("--n-actions", type=int, required=True)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-outcomes", type=int, default=2)
    p.add_argument("--max-outcomes", type=int, default=3)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--out", default=None, help="write the scenario here instead of stdout")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="benchmark generated instances")
    p.add_argument("params", help="JSON file with an 'instances' list of generator params")
    p.add_argument("--csv", required=True, help="output CSV path")
    p.add_argument(
        "--naive-csv",
        default=None,
        help="companion CSV for naive-pipeline rows (default: <csv>_naive.csv)",
    )
    p.add_argument(
        "--naive-max-states",
        type=int,
        default=50_000,
        help="skip the naive pipeline when the full graph exceeds this size",
    )
    add_cap(p)
    add_timeout(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    add_cap(p)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("lp-check", help="compare DP scores with the LP solution")
    p.add_argument("scenario", help="path to a scenario JSON file")
    p.add_argument("--budget", default=None, help="override the scenario budget")
    p.add_argument("--backend", choices=("topological", "highs"), default="topological")
    p.add_argument("--naive", action="store_true", help="check the unpruned graph")
    add_cap(p)
    add_timeout(p)
    p.set_defaults(func=cmd_lp_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except ScenarioError as exc:
        field = " (field: %s)" % exc.field if exc.field else ""
        print("error: %s%s" % (exc, field), file=sys.stderr)
        return EXIT_VALIDATION
    except (CapacityError, SolveTimeoutError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_CAPACITY
    except InternalCheckError as exc:
        print("internal error: %s" % exc, file=sys.stderr)
        return EXIT_INTERNAL
    except TreesolveError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

Exit codes: 0 when every requested check passes, 1 on an invariant
violation, 2 on usage errors (bad flags, infeasible parameters, invalid graphs).
"""

from __future__ import annotations

import argparse
import sys

from . import checks, engine, graphs, harness, oracle, traceio
from .algebra import BACKENDS, FLOAT, RATIONAL, format_scalar
from .errors import (ConvergenceBoundError, GenerationError, GraphValidationError,
                     ParameterError)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2
FAMILY_CHOICES = ("clique", "path", "cycle", "star", "btree", "balanced_binary_tree",
                  "regular_random")


class UsageError(Exception):
    pass


def _add_family_flags(p, n_many=False):
    p.add_argument("--family", choices=FAMILY_CHOICES)
    if n_many:
        p.add_argument("--n", type=int, nargs="+", help="one or more agent counts")
    else:
        p.add_argument("--n", type=int)
    p.add_argument("--degree", type=int, help="degree for regular_random")
    p.add_argument("--seed", type=int, default=0)


def _graph_from_args(args) -> graphs.Graph:
    if getattr(args, "graph", None):
        if args.family:
            raise UsageError("give either --graph or --family, not both")
        return graphs.read_edge_list(args.graph)
    if not args.family or args.n is None:
        raise UsageError("need --graph PATH or --family with --n")
    return graphs.make_family(args.family, args.n, args.degree, seed=args.seed)


def cmd_graph_gen(args) -> int:
    g = _graph_from_args(args)
    text = graphs.format_edge_list(g)
    if args.out:
        graphs.write_edge_list(g, args.out)
        m = graphs.metrics(g)
        print(f"wrote {args.out}: n={g.n} m={len(g.edges)} d={m.diameter} d*={m.min_degree}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _print_summary(trace, g):
    m = graphs.metrics(g)
    tau = trace.final.tau_sq
    print(f"n={g.n}")
    print(f"d={m.diameter}")
    print(f"backend={trace.backend}")
    print(f"t_last_change={trace.t_last_change}")
    print(f"t_all_equal={trace.t_all_equal}")
    print(f"bound_2nd={2 * g.n * m.diameter}")
    print(f"final_tau_sq={format_scalar(min(tau)) if min(tau) == max(tau) else 'not uniform'}")


def cmd_simulate(args) -> int:
    g = _graph_from_args(args)
    try:
        trace = engine.run(g, args.backend, max_rounds=args.max_rounds)
        status = EXIT_OK
    except ConvergenceBoundError as exc:
        print(f"BOUND VIOLATION: {exc}", file=sys.stderr)
        trace, status = exc.trace, EXIT_VIOLATION
    if args.out:
        traceio.save(trace, args.out)
    _print_summary(trace, g)
    return status


def cmd_verify(args) -> int:
    try:
        trace = traceio.load(args.trace)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read trace {args.trace}: {exc}") from None
    violations = graphs.validate(trace.graph)
    results = [checks.CheckResult("graph_valid", not violations, "; ".join(violations))]
    if not violations:
        results += checks.run_all(trace)
        world = oracle.sample_world(0.0, 1.0, trace.n, args.seed)
        rep = oracle.cross_validate(trace, world)
        results.append(checks.CheckResult("oracle_cross_validation", rep.ok, rep.summary()))
    for r in results:
        print(r.line())
    ok = all(r.ok for r in results)
    print("verify: " + ("all checks passed" if ok else "FAILED"))
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_sweep(args) -> int:
    if not args.family or not args.n:
        raise UsageError("sweep needs --family and --n")
    config = harness.SweepConfig(
        family=args.family, n_values=tuple(args.n), degree=args.degree,
        seeds=tuple(range(args.seed, args.seed + args.seeds)), backend=args.backend,
        out=args.out, workers=args.workers, deterministic=args.deterministic)
    rows = harness.sweep(config)
    for r in rows:
        print(f"{r.family} n={r.n} seed={r.seed} d={r.d} t_last_change={r.t_last_change} "
              f"bound_2nd={r.bound_2nd} max_dim_step={r.max_dim_step} "
              f"invariants_ok={str(r.invariants_ok).lower()}")
        for f in r.failures:
            print(f"    {f}")
    if len({r.n for r in rows}) >= 2:
        for rep in harness.conjecture_report(rows).values():
            for line in rep.lines():
                print(line)
    return EXIT_OK if all(r.invariants_ok for r in rows) else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gausslearn",
        description="Iterative Bayesian learning of a Gaussian state on a social network.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the process on one graph")
    _add_family_flags(p)
    p.add_argument("--graph", help="edge-list file")
    p.add_argument("--backend", choices=BACKENDS, default=RATIONAL)
    p.add_argument("--max-rounds", type=int, default=None)
    p.add_argument("--out", help="write the trace JSON here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="batch runs over n values and seeds")
    _add_family_flags(p, n_many=True)
    p.add_argument("--seeds", type=int, default=1, help="number of seeds, starting at --seed")
    p.add_argument("--backend", choices=BACKENDS, default=FLOAT)
    p.add_argument("--out", help="CSV path (a .json sidecar is written next to it)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--deterministic", action="store_true",
                   help="omit the timestamp header so reruns are byte-identical")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="check every invariant on a saved trace")
    p.add_argument("trace")
    p.add_argument("--seed", type=int, default=0, help="seed of the realized world for the oracle")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("graph-gen", help="write an edge list for a graph family")
    _add_family_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_graph_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on bad flags
    try:
        return args.func(args)
    except (UsageError, ParameterError, GraphValidationError, GenerationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

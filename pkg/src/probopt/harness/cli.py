"""Command-line entry point: ``run``, ``sweep`` and ``verify``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from ..cubic import random_subproblems, solve_cubic, verify_step_conditions
from ..errors import ConfigError, DomainExitError, LemmaViolation, MalformedTraceError, SolverError
from ..rng import stream
from .config import describe_keys, load_spec
from .csvio import write_summary_csv, write_trace_csv
from .experiment import setup
from .montecarlo import run_monte_carlo


EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG = 0, 1, 2


def _open_out(path: str | None):
    return open(path, "w", newline="") if path and path != "-" else None


def cmd_run(args) -> int:
    spec = load_spec(args.config)
    if not 0 <= args.p_index < len(spec.p_grid):
        raise ConfigError(f"p-index {args.p_index} out of range for grid.p")
    st = setup(spec)
    p = spec.p_grid[args.p_index]
    trace = st.run(p, stream(spec.master_seed, args.p_index, args.replication))
    fh = _open_out(args.output)
    try:
        write_trace_csv(trace, fh or sys.stdout)
    finally:
        if fh:
            fh.close()
    hits = ", ".join(f"eps={e:g}: {n}" for e, n in sorted(trace.hits.items(), reverse=True))
    print(f"p={p} replication={args.replication} hits: {hits}{' (capped)' if trace.capped else ''}",
          file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = load_spec(args.config)
    if args.replications is not None:
        spec = replace(spec, replications=args.replications)
    if args.seed is not None:
        spec = replace(spec, master_seed=args.seed)
    rows = run_monte_carlo(spec)
    fh = _open_out(args.output)
    try:
        write_summary_csv(rows, fh or sys.stdout)
    finally:
        if fh:
            fh.close()
    return EXIT_OK


def check_subproblems(count: int, seed: int = 0) -> list[str]:
    """Solve random cubic subproblems and describe any that fail the step conditions."""
    failures = []
    for i, sub in enumerate(random_subproblems(count, seed)):
        n = sub.g.size
        try:
            rep = verify_step_conditions(sub, solve_cubic(sub).s)
        except SolverError as exc:
            failures.append(f"subproblem {i} (n={n}): {exc}")
            continue
        if not rep.ok:
            failures.append(f"subproblem {i} (n={n}): {rep}")
    return failures


def cmd_verify(args) -> int:
    if args.config:
        specs = [load_spec(args.config)]
    else:
        from .presets import lemma_suite

        specs = lemma_suite(seeds=args.replications or 30)
    bad = 0
    for spec in specs:
        spec = replace(spec, check_lemmas=True)
        if args.replications is not None:
            spec = replace(spec, replications=args.replications)
        label = f"{spec.problem.name}/{spec.algorithm}"
        try:
            rows = run_monte_carlo(spec)
        except (LemmaViolation, MalformedTraceError, DomainExitError) as exc:
            print(f"FAIL {label}: {exc}")
            bad += 1
            continue
        soft = max((r.soft_violations for r in rows), default=0)
        note = f" ({soft} warnings on estimated constants)" if soft else ""
        print(f"ok   {label}: {spec.replications} replications x {len(spec.p_grid)} p values{note}")
    failures = check_subproblems(args.subproblems)
    for f in failures[:10]:
        print(f"FAIL {f}")
    print(f"{'ok  ' if not failures else 'FAIL'} cubic subproblems: "
          f"{args.subproblems - len(failures)}/{args.subproblems} satisfy the step conditions")
    return EXIT_VIOLATION if bad or failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="probopt", description=__doc__,
                                 epilog="config keys:\n" + describe_keys(),
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="one seeded realization; writes the trace CSV")
    r.add_argument("config")
    r.add_argument("--p-index", type=int, default=0, help="position in grid.p (default 0)")
    r.add_argument("--replication", type=int, default=0, help="replication index of the seed stream")
    r.add_argument("-o", "--output", help="output file (default stdout)")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="Monte Carlo over the (p, eps) grid; writes the summary CSV")
    s.add_argument("config")
    s.add_argument("--replications", type=int, help="override mc.replications")
    s.add_argument("--seed", type=int, help="override mc.master_seed")
    s.add_argument("-o", "--output", help="output file (default stdout)")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="per-realization lemma suite and cubic subproblem checks")
    v.add_argument("config", nargs="?", help="experiment to check (default: built-in suite)")
    v.add_argument("--replications", type=int, help="override replications per p")
    v.add_argument("--subproblems", type=int, default=300, help="random cubic subproblems to check")
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (LemmaViolation, MalformedTraceError) as exc:
        print(f"violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION

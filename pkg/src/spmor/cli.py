"""Command-line front end.

Subcommands::

    spmor reduce --config run.json --out DIR [--tol TOL] [--seed SEED]
    spmor bench-1d --out DIR
    spmor bench-spring --grid NBAR --k K --out DIR

Exit status is 0 on success, 2 for configuration errors and 3 when any
numerical step fails. ``MOR_THREADS`` caps the number of methods run in
parallel.
"""

import argparse
import sys

from .exceptions import ReductionError
from .pipeline import DEFAULT_METHODS, METHODS, ConfigError, RunConfig, run_pipeline, write_artifacts

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def _parser():
    p = argparse.ArgumentParser(prog="spmor", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("reduce", help="run a reduction described by a JSON configuration")
    r.add_argument("--config", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--tol", type=float)
    r.add_argument("--seed", type=int)

    b1 = sub.add_parser("bench-1d", help="four-state-pair 1D benchmark with all methods")
    b1.add_argument("--out", required=True)

    b2 = sub.add_parser("bench-spring", help="2D mass-spring benchmark")
    b2.add_argument("--grid", type=int, required=True, help="interior masses per side")
    b2.add_argument("--k", type=int, required=True, help="total reduced dimension")
    b2.add_argument("--out", required=True)
    b2.add_argument("--t-final", type=float, help="shorten the integration window")
    b2.add_argument("--methods", nargs="+", choices=METHODS)
    return p


def _config(args):
    if args.command == "reduce":
        cfg = RunConfig.from_file(args.config)
        if args.tol is not None:
            cfg.tol = args.tol
        if args.seed is not None:
            cfg.seed = args.seed
        return cfg
    if args.command == "bench-1d":
        return RunConfig.from_dict({"system": {"source": "builtin-1d"}, "methods": list(DEFAULT_METHODS)})
    d = {"system": {"source": "builtin-spring", "grid": args.grid}, "k": args.k,
         "methods": args.methods or ["pod", "srsb", "sp1", "sp2"]}
    if args.t_final is not None:
        d["integration"] = {"t_final": args.t_final}
    return RunConfig.from_dict(d)


def _print_summary(report):
    for r in ([report.full] if report.full else []) + report.results:
        if r.error:
            print(f"{r.method:>5}  FAILED [{r.error_code}] {r.error}")
            continue
        m = r.metrics
        print(f"{r.method:>5}  k={r.k:<4d} eta={m.eta:.4e}  eta_E={m.eta_E:.4e}  "
              f"margin={m.instability_margin:.4e}  E_inf={m.infinite_time_energy:.5g}")
    for w in report.warnings:
        print(f"warning ({w['method']}): {w['category']}: {w['message']}", file=sys.stderr)


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        cfg = _config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = run_pipeline(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ReductionError as exc:
        print(f"numerical failure [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    try:
        write_artifacts(report, args.out)
    except OSError as exc:
        print(f"cannot write artifacts: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_NUMERICAL
    _print_summary(report)
    return EXIT_NUMERICAL if report.failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

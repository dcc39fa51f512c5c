"""Command line entry point.

    simulate <config> [--sweep key=v1,v2,...] [--reps N] [--seed S]
             [--out DIR] [--jobs J] [--quiet]

Exit codes: 0 success, 1 configuration error, 2 runtime failure.
Writes results.csv (one row per run) and summary.csv (per sweep point)
into the output directory.
"""

import argparse
import os
import sys

from .config import ConfigError, load_config
from .experiment import RunFailure, run_experiment, write_rows_csv, write_summary_csv


def build_parser():
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Run a wireless sensor network MAC experiment sweep.")
    parser.add_argument("config", help="flat key=value configuration file")
    parser.add_argument("--sweep", action="append", default=[],
                        metavar="KEY=V1,V2,...",
                        help="add a sweep axis (repeatable)")
    parser.add_argument("--reps", type=int, default=None,
                        help="replications per sweep point")
    parser.add_argument("--seed", type=int, default=None,
                        help="base seed for per-run seed derivation")
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--jobs", type=int, default=1,
                        help="parallel worker processes")
    parser.add_argument("--quiet", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        spec = load_config(args.config)
        for item in args.sweep:
            if "=" not in item:
                raise ConfigError(f"--sweep expects KEY=V1,V2,...; got {item!r}")
            key, raw = item.split("=", 1)
            spec.add_axis(key.strip(), [v for v in raw.split(",") if v.strip()])
        if args.reps is not None:
            if args.reps < 1:
                raise ConfigError("--reps must be at least 1")
            spec.replications = args.reps
        if args.seed is not None:
            spec.base_seed = args.seed
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1

    progress = None
    if not args.quiet:
        def progress(done, total):
            print(f"\r{done}/{total} runs", end="", file=sys.stderr)

    try:
        rows, summary = run_experiment(spec, jobs=args.jobs, progress=progress)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except RunFailure as exc:
        print(f"\nruntime failure: {exc}", file=sys.stderr)
        return 2
    if not args.quiet:
        print("", file=sys.stderr)

    os.makedirs(args.out, exist_ok=True)
    rows_path = os.path.join(args.out, "results.csv")
    summary_path = os.path.join(args.out, "summary.csv")
    write_rows_csv(rows, rows_path)
    write_summary_csv(summary, spec.axes, summary_path)

    if not args.quiet:
        for entry in summary:
            axes = " ".join(f"{k}={entry[k]}" for k, _ in spec.axes)
            rel = entry["reliability_mean"]
            lat = entry["mean_latency_s_mean"]
            lat_txt = f"{lat:.4g}s" if lat is not None else "n/a"
            print(f"point {entry['point']} {axes}: reliability="
                  f"{rel:.3f} latency={lat_txt}")
        print(f"wrote {rows_path} and {summary_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

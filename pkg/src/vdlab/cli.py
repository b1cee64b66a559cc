"""Command line front door.

    vdlab run --config lab.ini [--experiment NAME] [--out DIR]
              [--set section.key=value ...] [--refine-levels N] [--seed N]
    vdlab validate --config lab.ini [--set ...]

Exit codes: 0 every invariant passed, 2 at least one failed, 1 the run
could not be carried out (bad config, singular domain, I/O).  The VDLAB_OUT
environment variable, when set, overrides any --out choice so batch drivers
can redirect output without touching the invocation.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import ConfigError, load_config
from .experiments import run_experiment
from .reports import summary_lines, write_report


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vdlab",
        description="Run verification experiments for the vacuum-coupled field laboratory.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="path to an INI run configuration")
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="SECTION.KEY=VALUE",
            help="override one config entry (repeatable)",
        )

    runp = sub.add_parser("run", help="run one experiment and write its report")
    common(runp)
    runp.add_argument("--experiment", help="experiment name (overrides the config)")
    runp.add_argument("--out", help="output directory (default: value from config or ./vdlab-out)")
    runp.add_argument("--refine-levels", type=int, help="refinement levels for convergence studies")
    runp.add_argument("--seed", type=int, help="seed for the manufactured-field corpus")

    valp = sub.add_parser("validate", help="parse and check a configuration, run nothing")
    common(valp)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)

    overrides = list(args.overrides)
    if args.command == "run":
        if args.experiment is not None:
            overrides.append(f"run.experiment={args.experiment}")
        if args.refine_levels is not None:
            overrides.append(f"numerics.refine_levels={args.refine_levels}")
        if args.seed is not None:
            overrides.append(f"run.seed={args.seed}")

    try:
        config = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"vdlab: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"vdlab: cannot read config: {exc}", file=sys.stderr)
        return 1

    if args.command == "validate":
        print(f"configuration ok: experiment={config.experiment}")
        return 0

    out_dir = os.environ.get("VDLAB_OUT") or args.out or config.out or "vdlab-out"
    try:
        report = run_experiment(config)
    except Exception as exc:  # singular domains, broken preconditions
        print(f"vdlab: run failed: {exc}", file=sys.stderr)
        return 1
    try:
        path = write_report(report, out_dir)
    except OSError as exc:
        print(f"vdlab: cannot write report: {exc}", file=sys.stderr)
        return 1

    for line in summary_lines(report):
        print(line)
    print(f"report: {path}")
    return 0 if report.all_passed else 2


if __name__ == "__main__":
    sys.exit(main())

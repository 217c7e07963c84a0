"""Command line entry point.

    sawsle run <config.ini>     run every experiment section in the file
    sawsle list                 list available experiment names
    sawsle resume <checkpoint>  resume an interrupted run

Exit codes: 0 success, 1 configuration error, 2 runtime numerical error.
"""

from __future__ import annotations

import argparse
import sys

from .experiments import ConfigError, list_experiments, resume, run
from .variation import TraceExhausted
from .zipper import ZipperError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sawsle",
        description="SAW/SLE parameterized-curve comparison experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run experiments from a config file")
    p_run.add_argument("config", help="INI file with experiment sections")
    sub.add_parser("list", help="list available experiments")
    p_res = sub.add_parser("resume", help="resume an interrupted run")
    p_res.add_argument("checkpoint",
                       help="artifact directory or a checkpoint file in it")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "list":
            for name in list_experiments():
                print(name)
        elif args.command == "run":
            for outdir in run(args.config):
                print(f"wrote {outdir}")
        else:
            print(f"wrote {resume(args.checkpoint)}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (ZipperError, TraceExhausted, FloatingPointError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

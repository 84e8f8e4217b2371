"""Command-line scenario runner.

Usage:  twinbeam run CONFIG [--out DIR] [--strict | --no-strict] [--threads N]

Exit codes: 0 on success, 2 on configuration errors, 3 on runtime physics
errors (measurement undefined, physicality violation, mode budget).
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, PgmFormatError, TwinbeamError
from .scenarios import parse_config, resolve_output_dir, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twinbeam",
        description="Run twin-beam amplifier simulation scenarios from a config file.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="execute one or more scenario configs")
    run.add_argument("configs", nargs="+", metavar="CONFIG", help="YAML scenario file(s)")
    run.add_argument("--out", default=None, help="output directory (overrides config)")
    run.add_argument(
        "--strict",
        dest="strict",
        action="store_true",
        default=True,
        help="reject unknown config keys (default)",
    )
    run.add_argument(
        "--no-strict",
        dest="strict",
        action="store_false",
        help="ignore unknown config keys",
    )
    run.add_argument(
        "--threads", type=int, default=1, help="worker threads for sweep points"
    )
    return parser


def _run(args) -> int:
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    for config_path in args.configs:
        try:
            cfg = parse_config(config_path, strict=args.strict)
        except (ConfigError, PgmFormatError) as err:
            print(f"config error in {config_path}: {err}", file=sys.stderr)
            return EXIT_CONFIG
        try:
            summary = run_scenario(cfg, out_dir=args.out, threads=args.threads)
        except TwinbeamError as err:
            print(f"runtime error in {config_path}: {err}", file=sys.stderr)
            return EXIT_RUNTIME
        out = resolve_output_dir(cfg, args.out)
        headline = ", ".join(f"{k}={v}" for k, v in sorted(summary.headline.items()))
        print(f"{cfg.kind} [{cfg.label}] -> {out / 'summary.json'}")
        print(f"  {headline}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _run(args)
    return EXIT_CONFIG  # unreachable: subparsers are required


if __name__ == "__main__":
    sys.exit(main())

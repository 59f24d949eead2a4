"""Command line entry point: ``natlift run <config> [--format json|text] [--out PATH]``.

Exit codes: 0 when every suite passes, 1 when a suite fails, 2 for an
unreadable config or a scenario with too many invalid sample points.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .errors import ConfigError, DomainError
from .scenario import emit_report, load_scenario, run_scenario

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="natlift", description="Verify lifted Kähler structures on T*M.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the suites of a scenario file")
    run.add_argument("config", help="YAML or JSON scenario file")
    run.add_argument("--format", choices=("json", "text"), default="text")
    run.add_argument("--out", help="write the report here instead of stdout")
    run.add_argument("--seed", type=int, help="override the scenario seed")
    run.add_argument("--samples", type=int, help="override the number of sample points")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = load_scenario(args.config)
        overrides = {k: getattr(args, k) for k in ("seed", "samples") if getattr(args, k) is not None}
        if overrides:
            scenario = replace(scenario, **overrides)
        report = run_scenario(scenario)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    data = emit_report(report, args.format)
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    if report.domain_failure:
        print(f"error: {report.points['invalid_fraction']:.0%} of sample points are invalid", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_PASS if report.passed else EXIT_FAIL

"""Command-line entry point.

``thermokernel run <file.json> [--out DIR] [--seed N] [--parallel]`` executes
a scenario; ``thermokernel verify <suite> [--seed N]`` runs one of the
randomized invariant suites (or ``all``).  The THERMOKERNEL_TOL environment
variable overrides the default tolerance tiers.
"""

from __future__ import annotations

import argparse
import sys

from .scenario import run_scenario
from .suites import SUITES, run_suites


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thermokernel")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a scenario file")
    run_p.add_argument("scenario", help="path to a scenario JSON file")
    run_p.add_argument("--out", default=None, help="artifact output directory")
    run_p.add_argument("--seed", type=int, default=None, help="override scenario seed")
    run_p.add_argument(
        "--parallel",
        action="store_true",
        help="run script commands concurrently when they share no atoms",
    )

    verify_p = sub.add_parser("verify", help="run an invariant suite")
    verify_p.add_argument("suite", help=f"one of: {', '.join(SUITES)}, all")
    verify_p.add_argument("--seed", type=int, default=42)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "run":
        result = run_scenario(
            args.scenario, out_dir=args.out, seed=args.seed, parallel=args.parallel
        )
        for line in result.messages:
            print(line)
        for path in result.artifacts:
            print(f"wrote {path}")
        return result.exit_code
    if args.command == "verify":
        if args.suite != "all" and args.suite not in SUITES:
            parser.error(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}, all")
        reports = run_suites(args.suite, seed=args.seed)
        ok = True
        for report in reports:
            for line in report.lines():
                print(line)
            ok = ok and report.passed
        return 0 if ok else 1
    parser.error("unknown command")  # pragma: no cover
    return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

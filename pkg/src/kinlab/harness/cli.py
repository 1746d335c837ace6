"""Command line entry point: kinlab <subcommand>."""
from __future__ import annotations

import argparse
import sys

from ..grid import ConfigurationError
from .config import criterion_configs, load_config
from .opchecks import operator_records
from .records import read_csv, write_csv
from .report import acceptance_report
from .sweep import run_sweep

_SWEEPS = {
    "expand-check": ("expansion", ["2"]),
    "linearize-check": ("linearization", ["3"]),
    "euler-limit": ("euler-limit", ["6"]),
    "acoustic-limit": ("acoustic-limit", ["7a", "7b"]),
}


def _finish(records, criteria, output) -> int:
    if output:
        write_csv(records, output)
    report = acceptance_report(records, criteria=criteria)
    for line in report.lines():
        print(line)
    return report.exit_code


def _sweep_command(args) -> int:
    name, criteria = _SWEEPS[args.command]
    if args.config:
        configs = [load_config(args.config, workers=args.workers)]
    else:
        configs = [c if args.workers is None else type(c)(**{**c.__dict__, "workers": args.workers})
                   for c in criterion_configs(name)]
    records = [r for cfg in configs for r in run_sweep(cfg)]
    return _finish(records, criteria, args.output)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="kinlab", description="Kinetic-limit laboratory.")
    sub = parser.add_subparsers(dest="command", required=True)

    ops = sub.add_parser("verify-ops", help="collision, Maxwellian and fluid property suites")
    ops.add_argument("--quick", action="store_true", help="coarse grids only (not the acceptance resolution)")
    ops.add_argument("--output", help="CSV file for the records")

    for cmd in _SWEEPS:
        p = sub.add_parser(cmd, help=f"{_SWEEPS[cmd][0]} sweep")
        p.add_argument("--config", help="INI sweep configuration; defaults to the acceptance parameters")
        p.add_argument("--output", help="CSV file for the records")
        p.add_argument("--workers", type=int, help="parallel (epsilon, delta) runs")

    rep = sub.add_parser("report", help="acceptance verdicts from record CSV files")
    rep.add_argument("csv", nargs="*", help="record files written by the other subcommands")

    args = parser.parse_args(argv)
    try:
        if args.command == "verify-ops":
            return _finish(operator_records(quick=args.quick), ["1", "4", "5", "8"], args.output)
        if args.command == "report":
            records = [r for path in args.csv for r in read_csv(path)]
            return _finish(records, None, None)
        return _sweep_command(args)
    except (ConfigurationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

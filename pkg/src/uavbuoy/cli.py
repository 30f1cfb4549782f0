"""Command-line entry point: ``uavbuoy simulate|compare|sweep``.

Exit codes: 0 success, 2 configuration error, 3 fatal dynamics error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from uavbuoy.errors import ConfigError, ReferenceInfeasibleError
from uavbuoy.harness import format_table, run, write_outputs, write_summary
from uavbuoy.scenario import CONTROLLERS, load_scenario

EXIT_OK, EXIT_CONFIG, EXIT_DYNAMICS = 0, 2, 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uavbuoy", description="UAV-towed buoy surge-velocity simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one scenario with one controller")
    sim.add_argument("scenario", type=Path)
    sim.add_argument("--controller", choices=CONTROLLERS, help="override the scenario's controller")
    sim.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: ./out)")
    sim.add_argument("--dt", type=float, help="physics step in seconds")
    sim.add_argument("--duration", type=float, help="simulated time in seconds")

    cmp_ = sub.add_parser("compare", help="run PID and FSVC on one scenario and print the comparison table")
    cmp_.add_argument("scenario", type=Path)
    cmp_.add_argument("--out", type=Path, default=Path("out"))

    sweep = sub.add_parser("sweep", help="compare both controllers on every *.toml in a directory")
    sweep.add_argument("directory", type=Path)
    sweep.add_argument("--out", type=Path, default=Path("out"))
    return parser


def _simulate(scenario, controllers, out: Path) -> tuple[dict, bool]:
    """Run each controller, write its files, and report whether any run hit a fatal error."""
    out.mkdir(parents=True, exist_ok=True)
    summaries = {}
    failed = False
    for ctrl in controllers:
        result = run(scenario.with_(controller=ctrl))
        write_outputs(result, out)
        summaries[ctrl] = result.summary
        if result.summary.error:
            failed = True
            print(f"{scenario.name}/{ctrl}: dynamics error: {result.summary.error}", file=sys.stderr)
    write_summary(scenario.name, summaries, out)
    return summaries, failed


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            sc = load_scenario(args.scenario)
            changes = {}
            if args.controller:
                changes["controller"] = args.controller
            if args.dt is not None:
                changes["dt_physics"] = args.dt
            if args.duration is not None:
                changes["duration"] = args.duration
            sc = sc.with_(**changes)
            summaries, failed = _simulate(sc, [sc.controller], args.out)
            print(format_table([(sc.name, summaries)]), end="")
        elif args.command == "compare":
            sc = load_scenario(args.scenario)
            summaries, failed = _simulate(sc, ["pid", "fsvc"], args.out)
            print(format_table([(sc.name, summaries)]), end="")
        else:
            files = sorted(args.directory.glob("*.toml"))
            if not files:
                raise ConfigError(f"no *.toml scenario files in {args.directory}")
            scenarios = [load_scenario(f) for f in files]
            rows, failed = [], False
            for sc in scenarios:
                summaries, bad = _simulate(sc, ["pid", "fsvc"], args.out)
                rows.append((sc.name, summaries))
                failed |= bad
            print(format_table(rows), end="")
    except (ConfigError, ReferenceInfeasibleError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_DYNAMICS if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

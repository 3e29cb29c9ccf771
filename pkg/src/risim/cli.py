"""Command line front end: run, validate, presets."""

from __future__ import annotations

import argparse
import os
import sys

from .config import GEOMETRY_PRESETS, ConfigError
from .harness import emit, load_scenario, run_scenario


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="risim",
                                     description="Multi-RIS multicast beamforming simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario file")
    run.add_argument("scenario", help="YAML scenario file")
    run.add_argument("--out", default=".", help="output directory")
    run.add_argument("--seed", type=int, default=None, help="override master seed")
    run.add_argument("--trials", type=int, default=None, help="override trial count")
    run.add_argument("--threads", type=int, default=None,
                     help="worker count (falls back to RIS_SIM_THREADS)")
    run.add_argument("--format", choices=("csv", "json"), default="csv")

    val = sub.add_parser("validate", help="check a scenario file")
    val.add_argument("scenario")

    sub.add_parser("presets", help="list shipped geometry presets")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "presets":
            for name in sorted(GEOMETRY_PRESETS):
                geo = GEOMETRY_PRESETS[name]
                print(f"{name}: {geo.num_groups} groups, "
                      f"user radius {geo.user_radius} m")
            return 0
        if args.command == "validate":
            scenario = load_scenario(args.scenario)
            print(f"scenario {scenario.name!r} is valid "
                  f"({len(scenario.sweep_values)} sweep values, {scenario.trials} trials)")
            return 0
        if args.command == "run":
            scenario = load_scenario(args.scenario)
            if args.seed is not None:
                scenario = type(scenario)(**{**scenario.__dict__, "master_seed": args.seed})
            if args.trials is not None:
                scenario = type(scenario)(**{**scenario.__dict__, "trials": args.trials})
            result = run_scenario(scenario, workers=args.threads)
            os.makedirs(args.out, exist_ok=True)
            path = os.path.join(args.out, f"{scenario.name}.{args.format}")
            emit(result, args.format, path)
            print(f"wrote {path} ({len(result.records)} records)")
            return 0
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())

"""Pre-populate the acceptance-suite sweep cache in resumable chunks.

The full sweeps take tens of minutes; this script computes one
(sweep value, trial range) slice per invocation and stores it as a partial
file, then ``merge`` assembles the slices into the exact result a single
in-process ``run_scenario`` call would produce (same deterministic seeding,
same record order).

Usage:
  python3 tests/_gen_acceptance_data.py run <power|antennas|elements> \
      --value-index I [--trials A:B]
  python3 tests/_gen_acceptance_data.py merge <power|antennas|elements>
  python3 tests/_gen_acceptance_data.py status
"""

import argparse
import dataclasses
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from acceptance_scenarios import CACHE_DIR, SWEEPS, cache_path  # noqa: E402

from risim.harness import (SCHEMES, SweepResult, TrialRecord, emit,  # noqa: E402
                           run_point, scenario_metadata)


def partial_path(name, vi, a, b):
    return CACHE_DIR / f"partial-{name}-v{vi}-t{a}_{b}.json"


def cmd_run(args):
    scenario = SWEEPS[args.sweep]()
    a, b = 0, scenario.trials
    if args.trials:
        a, b = (int(x) for x in args.trials.split(":"))
    out = partial_path(args.sweep, args.value_index, a, b)
    if out.exists():
        print(f"already exists: {out}")
        return 0
    records = []
    for t in range(a, b):
        records.extend(run_point(scenario, args.value_index, t))
    CACHE_DIR.mkdir(exist_ok=True)
    tmp = out.with_suffix(".tmp")
    with open(tmp, "w") as fh:
        json.dump([dataclasses.asdict(r) for r in records], fh)
    tmp.rename(out)
    print(f"wrote {out} ({len(records)} records)")
    return 0


def cmd_merge(args):
    scenario = SWEEPS[args.sweep]()
    records = []
    for part in sorted(CACHE_DIR.glob(f"partial-{args.sweep}-v*.json")):
        with open(part) as fh:
            records.extend(TrialRecord(**r) for r in json.load(fh))
    expect = len(scenario.sweep_values) * scenario.trials * len(scenario.schemes)
    if len(records) != expect:
        print(f"incomplete: {len(records)}/{expect} records present")
        return 1
    order = {s: i for i, s in enumerate(SCHEMES)}
    records.sort(key=lambda r: (r.sweep_value, r.trial, order[r.scheme]))
    result = SweepResult(scenario=scenario_metadata(scenario),
                         num_groups=scenario.base.num_groups, records=records)
    emit(result, "json", str(cache_path(scenario)))
    print(f"wrote {cache_path(scenario)}")
    return 0


def cmd_status(_args):
    for name, build in SWEEPS.items():
        sc = build()
        done = cache_path(sc).exists()
        parts = sorted(p.name for p in CACHE_DIR.glob(f"partial-{name}-v*.json"))
        print(f"{name}: merged={done} values={list(sc.sweep_values)} "
              f"trials={sc.trials} partials={parts}")
    return 0


def main(argv=None):
    ap = argparse.ArgumentParser()
    sub = ap.add_subparsers(dest="cmd", required=True)
    run = sub.add_parser("run")
    run.add_argument("sweep", choices=sorted(SWEEPS))
    run.add_argument("--value-index", type=int, required=True)
    run.add_argument("--trials", help="half-open range A:B of trial indices")
    run.set_defaults(fn=cmd_run)
    merge = sub.add_parser("merge")
    merge.add_argument("sweep", choices=sorted(SWEEPS))
    merge.set_defaults(fn=cmd_merge)
    status = sub.add_parser("status")
    status.set_defaults(fn=cmd_status)
    args = ap.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())

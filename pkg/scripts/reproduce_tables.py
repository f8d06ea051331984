#!/usr/bin/env python3
"""Sweep error budgets across system sizes and tabulate MVM counts.

Reproduces the structure of the published comparison tables with
hardware-independent work counts instead of wall-clock times.  Sizes 4000+
take minutes in pure numpy; pass --sizes to trim the sweep.

Usage:
  python3 scripts/reproduce_tables.py --kind converging --sizes 210 600 1500
"""

from __future__ import annotations

import argparse
import dataclasses
import time

from transq.scenario import solve_scenario
from transq.scenario_io import EXAMPLE_SIZES, gen_example

EPS_GRID = (5e-3, 1.5e-2, 3e-2, 5e-2)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--kind", choices=("original", "converging"), default="converging")
    parser.add_argument("--sizes", type=int, nargs="+", default=[210, 600, 1500],
                        choices=sorted(EXAMPLE_SIZES))
    parser.add_argument("--no-predict", action="store_true")
    args = parser.parse_args()

    header = f"{'size':>6} {'run':>12} {'total_mvm':>10} {'ssd_steps':>9} {'max_eps':>10} {'wall_s':>7}"
    print(header)
    print("-" * len(header))
    for size in args.sizes:
        base = gen_example(args.kind, size)
        if args.no_predict:
            base = dataclasses.replace(
                base, cfg=dataclasses.replace(base.cfg, predict=False))
        runs = [("no-ssd", dataclasses.replace(base, ssd=False))]
        runs += [(f"eps_T={e:g}", dataclasses.replace(base, eps_total=e)) for e in EPS_GRID]
        for label, sc in runs:
            started = time.perf_counter()
            tl = solve_scenario(sc)
            wall = time.perf_counter() - started
            print(f"{size:>6} {label:>12} {tl.total_mvm:>10} {tl.ssd_steps:>9} "
                  f"{tl.max_eps_accum:>10.3g} {wall:>7.2f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

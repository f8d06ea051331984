#!/usr/bin/env python3
"""Plot per-step iteration counts for a budget sweep on one example.

Produces the iterations-per-step view (one line per error budget, plus the
no-detection baseline) and a second panel with the per-step load.

Usage:
  python3 scripts/plot_iterations.py --kind converging --size 1500 --out iterations.png
"""

from __future__ import annotations

import argparse
import dataclasses

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from transq.scenario import solve_scenario
from transq.scenario_io import EXAMPLE_SIZES, gen_example

EPS_GRID = (5e-3, 1.5e-2, 3e-2, 5e-2)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--kind", choices=("original", "converging"), default="converging")
    parser.add_argument("--size", type=int, default=1500, choices=sorted(EXAMPLE_SIZES))
    parser.add_argument("--out", default="iterations.png")
    args = parser.parse_args()

    base = gen_example(args.kind, args.size)
    fig, (ax_iter, ax_load) = plt.subplots(
        2, 1, figsize=(11, 7), sharex=True, height_ratios=[3, 1])

    baseline = solve_scenario(dataclasses.replace(base, ssd=False))
    steps = range(1, len(baseline.records) + 1)
    ax_iter.plot(steps, [r.iterations for r in baseline.records],
                 label="no detection", color="black", lw=1.0)
    for eps_total in EPS_GRID:
        tl = solve_scenario(dataclasses.replace(base, eps_total=eps_total))
        ax_iter.plot(steps, [r.iterations for r in tl.records],
                     label=f"eps_T={eps_total:g}", lw=0.9)
    ax_iter.set_ylabel("iterations (MVM) per step")
    ax_iter.legend(loc="lower left", fontsize=8)
    ax_iter.set_title(f"{args.kind} example, size {args.size}")

    loads = [p.arrival_rate / (p.servers * p.service_rate) for p in base.periods]
    ax_load.plot(steps, loads, color="tab:red", lw=1.0)
    ax_load.axhline(1.0, color="grey", lw=0.6, ls="--")
    ax_load.set_ylabel("load")
    ax_load.set_xlabel("step")

    fig.tight_layout()
    fig.savefig(args.out, dpi=130)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Command-line front door.

Subcommands: ``solve`` a scenario file, ``gen-example`` to emit the canned
sinusoidal scenarios, ``bench`` to sweep error budgets and dump per-step
iteration counts, ``poisson-debug`` to inspect truncation points, and
``serve`` to start the HTTP what-if service.  ``TRANSQ_OUT_DIR`` sets the
default output directory.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time

from .poisson import build_poisson_weights
from .scenario import BudgetError, Scenario, solve_scenario
from .scenario_io import (
    EXAMPLE_KINDS,
    EXAMPLE_SIZES,
    ScenarioFormatError,
    gen_example,
    read_scenario,
    save_results,
    scenario_to_document,
    timeline_servers,
    write_scenario,
)

DEFAULT_EPS_GRID = (5e-3, 1.5e-2, 3e-2, 5e-2)

# Matches the budget the sweep's own per-step bound implies over 288 steps.
BASELINE_EPS_STEP = 1e-5


def _out_dir() -> str:
    return os.environ.get("TRANSQ_OUT_DIR", ".")


def _out_path(name: str) -> str:
    return name if os.path.isabs(name) or os.sep in name else os.path.join(_out_dir(), name)


def _apply_overrides(sc: Scenario, args: argparse.Namespace) -> Scenario:
    cfg = sc.cfg
    if args.eps_step is not None:
        cfg = dataclasses.replace(cfg, eps_step=args.eps_step)
    if args.delta_t is not None:
        cfg = dataclasses.replace(cfg, delta_t=args.delta_t)
    if args.precision is not None:
        cfg = dataclasses.replace(cfg, precision=f"binary{args.precision}")
    if args.no_predict:
        cfg = dataclasses.replace(cfg, predict=False)
    changes: dict = {"cfg": cfg}
    if args.eps_total is not None:
        changes["eps_total"] = args.eps_total
    if args.no_ssd:
        changes["ssd"] = False
    return dataclasses.replace(sc, **changes)


def cmd_solve(args: argparse.Namespace) -> int:
    sc = _apply_overrides(read_scenario(args.scenario), args)
    started = time.perf_counter()
    tl = solve_scenario(sc)
    wall = time.perf_counter() - started
    servers, rates = timeline_servers(sc)
    out = _out_path(args.out)
    save_results(
        tl, out, servers_at=servers, service_rates_at=rates, sl_wait=args.sl_wait,
        scenario_doc=scenario_to_document(sc), wall_time_s=wall,
    )
    print(f"records:       {len(tl.records)}")
    print(f"total MVM:     {tl.total_mvm}")
    print(f"ssd steps:     {tl.ssd_steps}")
    print(f"delta step 1:  {tl.delta_first:.6g}")
    print(f"max eps_accum: {tl.max_eps_accum:.6g}")
    print(f"max p_tail:    {tl.max_tail:.6g}")
    if tl.max_tail > sc.tail_alert:
        print(f"warning: max p_tail exceeds {sc.tail_alert:g}; "
              f"capacity_n may be too small for this scenario")
    print(f"wall time:     {wall:.3f} s")
    print(f"wrote {out}")
    return 0


def cmd_gen_example(args: argparse.Namespace) -> int:
    sc = gen_example(args.kind, args.size)
    out = _out_path(args.out or f"{args.kind}-{args.size}.json")
    write_scenario(sc, out)
    print(f"wrote {out}")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    base = gen_example(args.kind, args.size)
    grid = DEFAULT_EPS_GRID if args.eps_grid is None else tuple(args.eps_grid)
    runs: list[tuple[str, Scenario]] = [(
        "no-ssd",
        dataclasses.replace(
            base, ssd=False,
            cfg=dataclasses.replace(base.cfg, eps_step=args.baseline_eps),
            eps_total=max(base.eps_total, 2 * 288 * args.baseline_eps),
        ),
    )]
    for eps_total in grid:
        label = f"eps_T={eps_total:g}"
        sc = dataclasses.replace(base, eps_total=eps_total)
        if args.no_predict:
            sc = dataclasses.replace(sc, cfg=dataclasses.replace(sc.cfg, predict=False))
        runs.append((label, sc))

    print(f"{'run':>14} {'total_mvm':>10} {'ssd_steps':>9} {'max_eps':>12} {'wall_s':>8}")
    for label, sc in runs:
        started = time.perf_counter()
        tl = solve_scenario(sc)
        wall = time.perf_counter() - started
        print(f"{label:>14} {tl.total_mvm:>10} {tl.ssd_steps:>9} "
              f"{tl.max_eps_accum:>12.4g} {wall:>8.3f}")
        if args.out_dir is not None:
            name = label.replace("=", "_")
            path = os.path.join(args.out_dir, f"bench_{args.kind}_{args.size}_{name}.csv")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write("step,t_s,iterations,outcome,eps_accum,delta\n")
                for i, rec in enumerate(tl.records):
                    fh.write(f"{i},{rec.t:.17g},{rec.iterations},{rec.outcome},"
                             f"{rec.eps_accum:.17g},{rec.delta:.17g}\n")
    return 0


def cmd_poisson_debug(args: argparse.Namespace) -> int:
    try:
        pw = build_poisson_weights(args.lam, args.eps, args.eps_ssd)
    except ValueError as exc:
        print(json.dumps({"error": str(exc)}))
        return 1
    if not pw.valid:
        print(json.dumps({"error": f"construction rejected for lambda={args.lam:g}, "
                                   f"eps={args.eps:g}"}))
        return 1
    print(json.dumps({
        "l_ssd": pw.l_ssd, "l": pw.l, "k": pw.k,
        "W": pw.total_weight, "span": pw.span,
    }))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transq",
        description="Transient solver for time-varying M/M/s/n staffing scenarios",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a scenario file and write a results CSV")
    p.add_argument("--scenario", required=True, help="scenario JSON path")
    p.add_argument("--out", required=True, help="results CSV path")
    p.add_argument("--eps-total", type=float, default=None)
    p.add_argument("--eps-step", type=float, default=None)
    p.add_argument("--delta-t", type=float, default=None)
    p.add_argument("--precision", choices=("32", "64"), default=None)
    p.add_argument("--no-ssd", action="store_true", help="disable steady-state detection")
    p.add_argument("--no-predict", action="store_true", help="disable convergence prediction")
    p.add_argument("--sl-wait", type=float, default=20.0,
                   help="service-level wait target in seconds")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen-example", help="write a canned sinusoidal scenario")
    p.add_argument("--kind", choices=EXAMPLE_KINDS, required=True)
    p.add_argument("--size", type=int, choices=sorted(EXAMPLE_SIZES), required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen_example)

    p = sub.add_parser("bench", help="sweep error budgets on a canned example")
    p.add_argument("--kind", choices=EXAMPLE_KINDS, required=True)
    p.add_argument("--size", type=int, choices=sorted(EXAMPLE_SIZES), required=True)
    p.add_argument("--eps-grid", type=float, nargs="*", default=None,
                   help="eps_total values (default 5e-3 1.5e-2 3e-2 5e-2)")
    p.add_argument("--baseline-eps", type=float, default=BASELINE_EPS_STEP,
                   help="per-step bound of the no-ssd baseline")
    p.add_argument("--no-predict", action="store_true")
    p.add_argument("--out-dir", default=None, help="write per-step CSVs here")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("poisson-debug", help="print truncation points as JSON")
    p.add_argument("lam", type=float)
    p.add_argument("eps", type=float)
    p.add_argument("eps_ssd", type=float, nargs="?", default=None)
    p.set_defaults(func=cmd_poisson_debug)

    p = sub.add_parser("serve", help="start the HTTP what-if service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if getattr(args, "eps_ssd", "unset") is None:
        args.eps_ssd = args.eps * 1e-3
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: no such file: {exc.filename}", file=sys.stderr)
        return 2
    except (ScenarioFormatError, BudgetError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

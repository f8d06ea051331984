"""Scenario ingestion, result persistence, and canned example generators.

Scenario documents are JSON objects with the keys

    horizon_s, capacity_n, eps_total, eps_step, delta_T, eps_ssd_factor,
    output_dt_s, precision, periods, initial

where ``periods`` is a list of ``{dur_s, lambda_per_s, mu_per_s, servers}``
objects and ``initial`` is either the string "empty" or an explicit array
of capacity_n + 1 probabilities.  Results are written as CSV time series
(one row per solve step, numbers at 17 significant digits so binary64
values round-trip) plus a JSON sidecar with the run summary.
"""

from __future__ import annotations

import json
import math
import os
from typing import Any

import numpy as np

from .metrics import expected_state, service_level, tail_probability
from .scenario import Period, Scenario, Timeline, solve_plan
from .unistep import SolverConfig

# Named system sizes: capacity -> (servers, queue slots).
EXAMPLE_SIZES = {
    210: (30, 180),
    600: (100, 500),
    1500: (300, 1200),
    4000: (1000, 3000),
    9000: (3000, 6000),
}

EXAMPLE_KINDS = ("original", "converging")

_PERIOD_KEYS = {"dur_s", "lambda_per_s", "mu_per_s", "servers"}
_TOP_KEYS = {
    "horizon_s", "capacity_n", "eps_total", "eps_step", "delta_T",
    "eps_ssd_factor", "output_dt_s", "precision", "periods", "initial",
}


class ScenarioFormatError(ValueError):
    """Scenario document rejected; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


def _require(doc: dict, field: str, kinds: tuple[type, ...], where: str = "") -> Any:
    label = f"{where}{field}"
    if field not in doc:
        raise ScenarioFormatError(label, "missing required field")
    value = doc[field]
    if isinstance(value, bool) or not isinstance(value, kinds):
        raise ScenarioFormatError(label, f"expected {'/'.join(k.__name__ for k in kinds)}")
    return value


def load_scenario(document: dict) -> Scenario:
    """Validate a parsed scenario document and build the Scenario.

    Raises ScenarioFormatError with a field-level diagnostic on any schema
    violation; budget feasibility is checked later by the solver.
    """
    if not isinstance(document, dict):
        raise ScenarioFormatError("$", "document must be a JSON object")
    unknown = set(document) - _TOP_KEYS
    if unknown:
        raise ScenarioFormatError(sorted(unknown)[0], "unknown field")

    horizon = float(_require(document, "horizon_s", (int, float)))
    capacity = _require(document, "capacity_n", (int,))
    eps_total = float(_require(document, "eps_total", (int, float)))
    eps_step = float(_require(document, "eps_step", (int, float)))
    delta_t = float(_require(document, "delta_T", (int, float)))
    factor = float(document.get("eps_ssd_factor", 1e-3))
    output_dt = float(document.get("output_dt_s", 300.0))
    precision = document.get("precision", "binary64")
    if precision not in ("binary32", "binary64"):
        raise ScenarioFormatError("precision", "must be 'binary32' or 'binary64'")

    raw_periods = _require(document, "periods", (list,))
    if not raw_periods:
        raise ScenarioFormatError("periods", "must not be empty")
    periods = []
    for idx, entry in enumerate(raw_periods):
        where = f"periods[{idx}]."
        if not isinstance(entry, dict):
            raise ScenarioFormatError(f"periods[{idx}]", "expected object")
        unknown = set(entry) - _PERIOD_KEYS
        if unknown:
            raise ScenarioFormatError(f"{where}{sorted(unknown)[0]}", "unknown field")
        dur = float(_require(entry, "dur_s", (int, float), where))
        lam = float(_require(entry, "lambda_per_s", (int, float), where))
        mu = float(_require(entry, "mu_per_s", (int, float), where))
        servers = _require(entry, "servers", (int,), where)
        if dur <= 0.0:
            raise ScenarioFormatError(f"{where}dur_s", "must be > 0")
        if lam < 0.0:
            raise ScenarioFormatError(f"{where}lambda_per_s", "must be >= 0")
        if mu <= 0.0:
            raise ScenarioFormatError(f"{where}mu_per_s", "must be > 0")
        if not 1 <= servers <= capacity:
            raise ScenarioFormatError(
                f"{where}servers", f"must be in [1, capacity_n={capacity}]")
        periods.append(Period(dur, lam, mu, servers))

    total = sum(p.duration for p in periods)
    if not math.isclose(total, horizon, rel_tol=1e-9, abs_tol=1e-6):
        raise ScenarioFormatError(
            "horizon_s", f"periods sum to {total:g}, document says {horizon:g}")

    initial = document.get("initial", "empty")
    init_vec: np.ndarray | None = None
    if initial != "empty":
        if not isinstance(initial, list):
            raise ScenarioFormatError("initial", "must be 'empty' or an array")
        if len(initial) != capacity + 1:
            raise ScenarioFormatError(
                "initial", f"length {len(initial)} != capacity_n + 1 = {capacity + 1}")
        init_vec = np.asarray(initial, np.float64)
        if np.any(init_vec < 0.0) or not math.isclose(float(init_vec.sum()), 1.0, abs_tol=1e-9):
            raise ScenarioFormatError("initial", "must be a probability distribution")

    try:
        cfg = SolverConfig(
            eps_step=eps_step, eps_ssd_factor=factor, delta_t=delta_t,
            precision=precision,
        )
        return Scenario(
            periods=tuple(periods), capacity=capacity, eps_total=eps_total,
            cfg=cfg, output_dt=output_dt, initial=init_vec,
        )
    except ValueError as exc:
        raise ScenarioFormatError("$", str(exc)) from exc


def scenario_to_document(sc: Scenario) -> dict:
    doc: dict[str, Any] = {
        "horizon_s": sc.horizon,
        "capacity_n": sc.capacity,
        "eps_total": sc.eps_total,
        "eps_step": sc.cfg.eps_step,
        "delta_T": sc.cfg.delta_t,
        "eps_ssd_factor": sc.cfg.eps_ssd_factor,
        "output_dt_s": sc.output_dt,
        "precision": sc.cfg.precision,
        "periods": [
            {
                "dur_s": p.duration,
                "lambda_per_s": p.arrival_rate,
                "mu_per_s": p.service_rate,
                "servers": p.servers,
            }
            for p in sc.periods
        ],
        "initial": "empty" if sc.initial is None else [float(x) for x in sc.initial],
    }
    return doc


def read_scenario(path: str) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return load_scenario(json.load(fh))


def write_scenario(sc: Scenario, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_document(sc), fh, indent=2)
        fh.write("\n")


def gen_example(kind: str, size: int) -> Scenario:
    """Sinusoidal one-day staffing scenario at a named system size.

    24 h horizon in 288 five-minute periods; the mean service time is one
    period (mu = 1/300 per second) and servers are constant.  Per-period
    arrival rates are exact integral averages of
    s * mu * (base + amp * sin(3*pi*t/T)), so the load sweeps two peaks:
    0.65..1.05 for kind="original", 0.70..0.90 for kind="converging".
    """
    if kind not in EXAMPLE_KINDS:
        raise ValueError(f"kind must be one of {EXAMPLE_KINDS}")
    if size not in EXAMPLE_SIZES:
        raise ValueError(f"size must be one of {sorted(EXAMPLE_SIZES)}")
    servers, _ = EXAMPLE_SIZES[size]
    base, amp = (0.85, 0.2) if kind == "original" else (0.8, 0.1)
    horizon = 86400.0
    dur = 300.0
    mu = 1.0 / dur
    omega = 3.0 * math.pi / horizon
    periods = []
    for i in range(288):
        t0 = i * dur
        t1 = t0 + dur
        # Exact average of sin(omega t) over [t0, t1].
        avg_sin = (math.cos(omega * t0) - math.cos(omega * t1)) / (omega * dur)
        lam = servers * mu * (base + amp * avg_sin)
        periods.append(Period(dur, lam, mu, servers))
    return Scenario(
        periods=tuple(periods),
        capacity=size,
        eps_total=5e-3,
        cfg=SolverConfig(),
        output_dt=dur,
    )


def save_results(
    tl: Timeline,
    path: str,
    *,
    servers_at: list[int] | None = None,
    service_rates_at: list[float] | None = None,
    sl_wait: float = 20.0,
    scenario_doc: dict | None = None,
    wall_time_s: float | None = None,
) -> None:
    """Write the timeline as CSV plus a JSON metadata sidecar.

    ``servers_at`` / ``service_rates_at`` give the per-record staffing used
    for the service-level column; when omitted the column is empty.  A
    partial file is removed if writing fails.
    """
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write("t_s,ES,p_tail,SL_d,eps_accum,iterations,outcome\n")
            for i, rec in enumerate(tl.records):
                if servers_at is not None:
                    sl = service_level(rec.p, servers_at[i], service_rates_at[i], sl_wait)
                    sl_text = _num(sl)
                else:
                    sl_text = ""
                fh.write(
                    f"{_num(rec.t)},{_num(expected_state(rec.p))},"
                    f"{_num(tail_probability(rec.p))},{sl_text},"
                    f"{_num(rec.eps_accum)},{rec.iterations},{rec.outcome}\n"
                )
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise

    sidecar = {
        "records": len(tl.records),
        "total_mvm": tl.total_mvm,
        "ssd_steps": tl.ssd_steps,
        "max_eps_accum": tl.max_eps_accum if tl.records else None,
        "max_p_tail": tl.max_tail if tl.records else None,
        "delta_first": tl.delta_first if tl.records else None,
        "flushed_mass": tl.flushed_mass,
        "sl_wait_s": sl_wait,
        "wall_time_s": wall_time_s,
        "scenario": scenario_doc,
    }
    with open(path + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")


def load_results(path: str) -> list[dict[str, Any]]:
    """Parse a results CSV back into one dict per row."""
    rows: list[dict[str, Any]] = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split(",")
        for line in fh:
            parts = line.rstrip("\n").split(",")
            row: dict[str, Any] = dict(zip(header, parts))
            for key in ("t_s", "ES", "p_tail", "SL_d", "eps_accum"):
                row[key] = float(row[key]) if row[key] != "" else None
            row["iterations"] = int(row["iterations"])
            rows.append(row)
    return rows


def _num(x: float) -> str:
    return f"{x:.17g}"


def timeline_servers(sc: Scenario) -> tuple[list[int], list[float]]:
    """Per-record (servers, service_rate) matching solve_scenario's plan."""
    plan = solve_plan(sc)
    return [p.servers for _, p in plan], [p.service_rate for _, p in plan]

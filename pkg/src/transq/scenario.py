"""Multi-interval driver with a whole-horizon error budget.

A scenario is an ordered list of constant-rate periods over a shared state
space.  The driver walks them in order, splitting long periods at the
output interval, and before every solve step converts the unspent part of
the global error budget into that step's steady-state detection threshold.
Detection outcomes reset the accumulated error to the step's own absolute
value; full sums add the per-step truncation bound.  Server-count changes
between periods hand the state vector over unchanged: a shrinking team
sends in-service requests back to the queue, so only the interpretation of
a state shifts, never its probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .chain import StepParams, empty_system
from .unistep import OUTCOME_FULL, SolverConfig, solve_step

BUDGET_MODES = ("constant", "proportional")

# Default alert level for the finite-capacity adequacy monitor.
TAIL_ALERT_DEFAULT = 1.5e-3


class BudgetError(ValueError):
    """Global error budget cannot cover the planned solve steps."""


@dataclass(frozen=True)
class Period:
    duration: float
    arrival_rate: float
    service_rate: float
    servers: int

    def __post_init__(self) -> None:
        if not self.duration > 0.0:
            raise ValueError("period duration must be > 0")


@dataclass(frozen=True)
class Scenario:
    """A full planning horizon plus solver configuration.

    ``output_dt > 0`` splits periods into chunks of at most that length so
    intermediary distributions land on a regular grid; 0 keeps period
    boundaries only.  ``initial = None`` starts the system empty.
    """

    periods: tuple[Period, ...]
    capacity: int
    eps_total: float
    cfg: SolverConfig = field(default_factory=SolverConfig)
    output_dt: float = 300.0
    initial: np.ndarray | None = None
    ssd: bool = True
    budget: str = "constant"
    tail_alert: float = TAIL_ALERT_DEFAULT

    def __post_init__(self) -> None:
        if not self.periods:
            raise ValueError("scenario needs at least one period")
        if not 0.0 < self.eps_total < 1.0:
            raise ValueError("eps_total must be in (0, 1)")
        if self.output_dt < 0.0:
            raise ValueError("output_dt must be >= 0")
        if self.budget not in BUDGET_MODES:
            raise ValueError(f"budget must be one of {BUDGET_MODES}")
        for idx, p in enumerate(self.periods):
            if not 1 <= p.servers <= self.capacity:
                raise ValueError(f"period {idx}: servers must be in [1, capacity]")
        if self.initial is not None and len(self.initial) != self.capacity + 1:
            raise ValueError("initial distribution length must be capacity + 1")

    @property
    def horizon(self) -> float:
        return sum(p.duration for p in self.periods)


@dataclass(frozen=True)
class TimelineRecord:
    t: float
    p: np.ndarray
    eps_accum: float
    iterations: int
    outcome: str
    delta: float


@dataclass(frozen=True)
class Timeline:
    records: tuple[TimelineRecord, ...]
    flushed_mass: float = 0.0

    @property
    def total_mvm(self) -> int:
        return sum(r.iterations for r in self.records)

    @property
    def max_eps_accum(self) -> float:
        return max(r.eps_accum for r in self.records)

    @property
    def max_tail(self) -> float:
        return max(float(r.p[-1]) for r in self.records)

    @property
    def ssd_steps(self) -> int:
        return sum(1 for r in self.records if r.outcome != OUTCOME_FULL)

    @property
    def delta_first(self) -> float:
        return self.records[0].delta

    @property
    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.records])


def delta_threshold(eps_total: float, eps_m: float, eps_steps_remaining: float) -> float:
    """Detection threshold that keeps the whole run under eps_total.

    Unspent budget = total bound, minus error accumulated so far, minus the
    truncation bounds every remaining step will still add.  Clamped at 0,
    which disables detection for the step.
    """
    return max(0.0, eps_total - eps_m - eps_steps_remaining)


def proportional_budget(eps_remaining: float, duration: float, horizon_remaining: float) -> float:
    """Per-step bound proportional to the step's share of remaining time."""
    if duration == 0.0:
        return 0.0
    if not horizon_remaining > 0.0:
        raise ValueError("horizon_remaining must be > 0")
    return eps_remaining * duration / horizon_remaining


def solve_plan(sc: Scenario) -> list[tuple[float, Period]]:
    """Solve-step plan: (chunk duration, owning period) in time order."""
    plan: list[tuple[float, Period]] = []
    for p in sc.periods:
        if sc.output_dt <= 0.0 or p.duration <= sc.output_dt:
            plan.append((p.duration, p))
            continue
        remaining = p.duration
        while remaining > 0.0:
            if remaining <= sc.output_dt * (1.0 + 1e-9):
                # Absorb float crumbs into the final chunk.
                dt = remaining
            else:
                dt = sc.output_dt
            plan.append((dt, p))
            remaining -= dt
    return plan


def solve_scenario(sc: Scenario) -> Timeline:
    """Run the full horizon and return one record per solve step."""
    plan = solve_plan(sc)
    if sc.budget == "constant" and len(plan) * sc.cfg.eps_step >= sc.eps_total:
        raise BudgetError(
            f"{len(plan)} steps at eps_step={sc.cfg.eps_step:g} exhaust "
            f"eps_total={sc.eps_total:g}"
        )

    if sc.initial is None:
        p = empty_system(sc.capacity)
    else:
        p = np.asarray(sc.initial, np.float64).copy()

    records: list[TimelineRecord] = []
    eps_accum = 0.0
    flushed = 0.0
    t = 0.0
    for idx, (dt, period) in enumerate(plan):
        cfg = sc.cfg
        if sc.budget == "constant":
            remaining = (len(plan) - idx) * cfg.eps_step
            delta = delta_threshold(sc.eps_total, eps_accum, remaining) if sc.ssd else 0.0
        else:
            # Proportional allocation spends the whole remaining budget on
            # truncation, leaving no headroom for detection.
            cfg = replace(cfg, eps_step=proportional_budget(
                sc.eps_total - eps_accum, dt, sc.horizon - t))
            delta = 0.0
        params = StepParams(
            arrival_rate=period.arrival_rate,
            service_rate=period.service_rate,
            servers=period.servers,
            capacity=sc.capacity,
            duration=dt,
        )
        try:
            res = solve_step(p, params, cfg, delta, eps_accum)
        except Exception as exc:
            raise RuntimeError(f"solve step {idx} (t={t:g}) failed: {exc}") from exc
        p = res.p_out
        eps_accum = res.eps_out
        flushed += res.flushed_mass
        t += dt
        records.append(TimelineRecord(t, p, eps_accum, res.iterations, res.outcome, delta))
    return Timeline(tuple(records), flushed)

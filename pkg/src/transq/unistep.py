"""Transient solve of one homogeneous interval by uniformization.

The probability vector at the end of the interval is the Poisson-weighted
sum of the embedded chain's iterates between the left and right truncation
points.  While the chain is converging and a detection threshold is set,
iteration may stop early: either the iterate is already within the
threshold of the stationary vector (direct detection), or a second-order
model of the log-distance decay predicts it will be by the time the
remaining Poisson mass is negligible (predicted detection).  Both early
stops replace the result with the stationary vector and make the step's
error absolute, independent of error carried into the step; an
iteration-shift guard compensates for the carried error having moved the
start vector spuriously close to the stationary one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .chain import (
    STORAGE_DTYPES,
    DtmcKernel,
    StepParams,
    is_converging,
    steady_state,
    uniformization_rate,
)
from .poisson import build_poisson_weights

Outcome = Literal["full-sum", "ssd-direct", "ssd-predicted"]

OUTCOME_FULL: Outcome = "full-sum"
OUTCOME_SSD_DIRECT: Outcome = "ssd-direct"
OUTCOME_SSD_PREDICTED: Outcome = "ssd-predicted"


@dataclass(frozen=True)
class SolverConfig:
    """Per-step solver knobs.

    ``eps_step`` is the truncation error bound of a single solve step;
    ``eps_ssd_factor`` scales it down to place the negligible-mass left
    point; ``delta_t`` is the admissibility ceiling for the predicted
    detection path; ``check_spacing`` is the iteration gap between
    convergence tests (None picks max(1, (k - l) // 64) per step).
    """

    eps_step: float = 1e-7
    eps_ssd_factor: float = 1e-3
    delta_t: float = 5.5e-2
    check_spacing: int | None = None
    precision: str = "binary64"
    predict: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.eps_step < 1.0:
            raise ValueError("eps_step must be in (0, 1)")
        if not 0.0 < self.eps_ssd_factor <= 1.0:
            raise ValueError("eps_ssd_factor must be in (0, 1]")
        if not 0.0 < self.delta_t < 1.0:
            raise ValueError("delta_t must be in (0, 1)")
        if self.check_spacing is not None and self.check_spacing < 1:
            raise ValueError("check_spacing must be >= 1")
        if self.precision not in STORAGE_DTYPES:
            raise ValueError(f"precision must be one of {sorted(STORAGE_DTYPES)}")


@dataclass(frozen=True)
class StepResult:
    p_out: np.ndarray
    eps_out: float
    iterations: int
    outcome: Outcome
    flushed_mass: float = 0.0


def relative_distance(v: np.ndarray, v_inf: np.ndarray) -> float:
    """Max-abs distance of v from v_inf, relative to v_inf's max entry."""
    ref = float(np.max(np.abs(v_inf)))
    if ref == 0.0:
        raise ValueError("reference vector is identically zero")
    diff = np.asarray(v, np.float64) - np.asarray(v_inf, np.float64)
    return float(np.max(np.abs(diff))) / ref


class ConvergenceEstimate:
    """Finite-difference model of log xi(i) at equally spaced checkpoints.

    ``observe`` must be called once per checkpoint, in order; the estimate
    keeps the last three log values, enough for the slope ``cr`` and its
    per-iteration change ``cr_prime``.
    """

    def __init__(self, xi_0: float, spacing: int) -> None:
        if spacing < 1:
            raise ValueError("spacing must be >= 1")
        self.xi_0 = xi_0
        self.spacing = spacing
        self.log_xi_0 = math.log(xi_0) if xi_0 > 0.0 else -math.inf
        self._logs: list[float] = [self.log_xi_0]
        self._count = 1

    def observe(self, xi: float) -> None:
        self._logs.append(math.log(xi) if xi > 0.0 else -math.inf)
        if len(self._logs) > 3:
            del self._logs[0]
        self._count += 1

    @property
    def log_xi_latest(self) -> float:
        return self._logs[-1]

    @property
    def xi_latest(self) -> float:
        return math.exp(self._logs[-1])

    @property
    def can_predict(self) -> bool:
        return self._count >= 3

    @property
    def cr(self) -> float:
        if self._count < 2:
            return math.nan
        return (self._logs[-1] - self._logs[-2]) / self.spacing

    @property
    def cr_prime(self) -> float:
        if self._count < 3:
            return math.nan
        prev_cr = (self._logs[-2] - self._logs[-3]) / self.spacing
        return (self.cr - prev_cr) / self.spacing


def _k_epsilon(log_xi_0: float, xi_0: float, log_xi_s: float, steps: int, eps_t: float) -> float:
    if eps_t == 0.0:
        return 0.0
    if steps < 1:
        raise ValueError("steps must be >= 1")
    rate = (log_xi_s - log_xi_0) / steps
    if math.isnan(rate) or not rate < 0.0:
        return math.inf
    return (log_xi_0 - math.log(xi_0 + eps_t)) / rate


def k_epsilon(est: ConvergenceEstimate, eps_t: float, steps: int) -> float:
    """Iteration-shift bound for a start vector perturbed by carried error.

    With a non-converging or stalled estimate the bound is +inf, which
    disables early detection for the step.
    """
    return _k_epsilon(est.log_xi_0, est.xi_0, est.log_xi_latest, steps, eps_t)


def predict_log_xi(est: ConvergenceEstimate, i: int, l_s: int) -> float:
    """Second-order extrapolation of log xi from checkpoint i to l_s."""
    if not est.can_predict:
        raise ValueError("need at least three checkpoints to extrapolate")
    ahead = l_s - i
    return est.log_xi_latest + ahead * est.cr + 0.5 * ahead * ahead * est.cr_prime


def solve_step(
    p_in: np.ndarray,
    step: StepParams,
    cfg: SolverConfig,
    delta: float,
    eps_t: float,
) -> StepResult:
    """Advance p_in across one homogeneous interval.

    ``delta`` is the steady-state detection threshold (0 disables both
    detection paths and all stationary-vector work); ``eps_t`` is the
    absolute error carried into the step.  On a full truncated sum the
    returned error is ``eps_t + cfg.eps_step``.  On either detection
    outcome it is the step's own absolute bound, independent of ``eps_t``:
    the truncated cdf below the stopping iteration plus the measured (or
    predicted) relative distance scaled back by the stationary peak entry.
    A zero-length interval returns the input unchanged.
    """
    dtype = STORAGE_DTYPES[cfg.precision]
    alpha = uniformization_rate(step)
    jump_mean = alpha * step.duration
    if jump_mean == 0.0:
        return StepResult(np.asarray(p_in, np.float64).copy(), eps_t, 0, OUTCOME_FULL)

    pw = build_poisson_weights(jump_mean, cfg.eps_step, cfg.eps_step * cfg.eps_ssd_factor)
    if not pw.valid:
        raise ValueError(f"weight construction rejected mean={jump_mean!r}")

    kernel = DtmcKernel(step, alpha, dtype)
    v = np.asarray(p_in, dtype).copy()
    acc = np.zeros(step.capacity + 1, np.float64)
    if pw.l == 0:
        acc += np.asarray(v, np.float64) * pw.raw_weight(0)

    detecting = delta > 0.0 and is_converging(step)
    spacing = cfg.check_spacing or max(1, (pw.k - pw.l) // 64)
    pi_inf: np.ndarray | None = None
    est: ConvergenceEstimate | None = None
    log_delta = 0.0
    pi_max = 1.0
    eps_rel = eps_t
    if detecting:
        pi_inf = steady_state(step, cfg.precision)
        # Detection distances are relative to the stationary peak, while
        # carried and booked errors are absolute max-norm bounds; pi_max
        # converts between the two.
        pi_max = float(np.max(pi_inf))
        eps_rel = eps_t / pi_max
        est = ConvergenceEstimate(relative_distance(v, pi_inf), spacing)
        log_delta = math.log(delta)

    for i in range(1, pw.k + 1):
        v = kernel(v)
        if detecting and i < pw.l and i % spacing == 0:
            xi = relative_distance(v, pi_inf)
            est.observe(xi)
            if xi < delta:
                if i < pw.l - k_epsilon(est, eps_rel, i):
                    eps_out = pw.essd(i) + xi * pi_max
                    return StepResult(
                        pi_inf.astype(np.float64), eps_out, i,
                        OUTCOME_SSD_DIRECT, kernel.flushed_mass,
                    )
            elif cfg.predict and est.can_predict and xi < cfg.delta_t and i < pw.l_ssd:
                predicted = predict_log_xi(est, i, pw.l_ssd)
                if predicted < log_delta:
                    guard = _k_epsilon(est.log_xi_0, est.xi_0, predicted, pw.l_ssd, eps_rel)
                    if pw.l_ssd + guard <= pw.l:
                        return StepResult(
                            pi_inf.astype(np.float64), math.exp(predicted) * pi_max, i,
                            OUTCOME_SSD_PREDICTED, kernel.flushed_mass,
                        )
        if i >= pw.l:
            acc += np.asarray(v, np.float64) * pw.raw_weight(i)

    return StepResult(
        acc / pw.total_weight, eps_t + cfg.eps_step, pw.k,
        OUTCOME_FULL, kernel.flushed_mass,
    )

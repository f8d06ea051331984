"""Birth-death M/M/s/n chain in implicit form.

State i in {0..n} counts requests in the system.  Transitions are to
neighbors only: up at the arrival rate (below n), down at min(i, s) times
the per-server service rate.  Nothing materializes the transition matrix;
the uniformized one-step kernel regenerates its three coefficient diagonals
from the step parameters.

Vectors are plain numpy arrays; the storage precision tag is the dtype
(float32 or float64).  In float32 mode the kernel flushes magnitudes below
``FLUSH_THRESHOLD`` to exact zero and tallies the discarded mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .poisson import MODE_ANCHOR

# Entries below this are treated as insignificant in float32 storage mode.
FLUSH_THRESHOLD = 1e-37

# Smallest positive normal binary64; the stationary recursion stops once a
# weight would leave the normal range and zero-fills the remainder.
MIN_NORMAL = 2.2250738585072014e-308

STORAGE_DTYPES = {"binary32": np.float32, "binary64": np.float64}


@dataclass(frozen=True)
class StepParams:
    """One homogeneous interval of the piecewise-constant system.

    ``capacity`` is the largest state index n; the queue holds
    ``capacity - servers`` waiting requests.
    """

    arrival_rate: float
    service_rate: float
    servers: int
    capacity: int
    duration: float

    def __post_init__(self) -> None:
        if not self.arrival_rate >= 0.0:
            raise ValueError("arrival_rate must be >= 0")
        if not self.service_rate > 0.0:
            raise ValueError("service_rate must be > 0")
        if not 1 <= self.servers <= self.capacity:
            raise ValueError("need 1 <= servers <= capacity")
        if not self.duration >= 0.0:
            raise ValueError("duration must be >= 0")

    @property
    def load(self) -> float:
        return self.arrival_rate / (self.servers * self.service_rate)


def uniformization_rate(step: StepParams) -> float:
    """Smallest step-constant rate dominating every exit rate of the chain."""
    return step.arrival_rate + step.servers * step.service_rate


def is_converging(step: StepParams) -> bool:
    """True iff the embedded chain has a meaningful limit (load < 1)."""
    return step.arrival_rate < step.servers * step.service_rate


def empty_system(capacity: int, dtype=np.float64) -> np.ndarray:
    v = np.zeros(capacity + 1, dtype=dtype)
    v[0] = 1.0
    return v


class DtmcKernel:
    """Applies v -> v (I + Q/alpha) for the birth-death generator.

    Coefficients live in the storage dtype so float32 runs do the full
    multiply in single precision.  ``flushed_mass`` accumulates probability
    discarded by the float32 flush-to-zero.
    """

    def __init__(self, step: StepParams, alpha: float, dtype=np.float64) -> None:
        if alpha < uniformization_rate(step):
            raise ValueError("alpha below the uniformization rate")
        n = step.capacity
        states = np.arange(n + 1, dtype=np.float64)
        down = np.minimum(states, step.servers) * step.service_rate
        up = np.full(n + 1, step.arrival_rate)
        up[n] = 0.0
        self.up = (up / alpha).astype(dtype)
        self.down = (down / alpha).astype(dtype)
        self.stay = (1.0 - (up + down) / alpha).astype(dtype)
        self.flush = np.dtype(dtype) == np.float32
        self.flushed_mass = 0.0

    def __call__(self, v: np.ndarray) -> np.ndarray:
        out = v * self.stay
        out[1:] += v[:-1] * self.up[:-1]
        out[:-1] += v[1:] * self.down[1:]
        if self.flush:
            small = (out != 0.0) & (np.abs(out) < FLUSH_THRESHOLD)
            if small.any():
                self.flushed_mass += float(out[small].sum())
                out[small] = 0.0
        return out


def dtmc_step(v: np.ndarray, step: StepParams, alpha: float | None = None) -> np.ndarray:
    """One uniformized transition of v at rate alpha (defaults to the exact rate)."""
    if alpha is None:
        alpha = uniformization_rate(step)
    return DtmcKernel(step, alpha, v.dtype)(v)


def steady_state(step: StepParams, precision: str = "binary64") -> np.ndarray:
    """Stationary distribution of the M/M/s/n chain.

    Computed by the same mode-anchored outward recursion as the Poisson
    weights: anchor 2^176 at the mode of the stationary weights, ratios
    offered/k below the server count and offered/s above it, recursion cut
    to exact zero once a weight leaves the binary64 normal range, then
    normalized.  Loads >= 1 are legal; the finite capacity keeps the vector
    proper (the anchor clamps to the last state).
    """
    dtype = STORAGE_DTYPES[precision]
    n = step.capacity
    s = step.servers
    if step.arrival_rate == 0.0:
        return empty_system(n, dtype)
    offered = step.arrival_rate / step.service_rate
    # Weight ratio offered/min(i, s) is >= 1 everywhere once offered >= s,
    # so the sequence peaks at the last state; below that the peak is at
    # floor(offered), inside the single-rate region.
    mode = n if offered >= s else min(n, int(math.floor(offered)))

    w = [0.0] * (n + 1)
    w[mode] = MODE_ANCHOR
    for i in range(mode, 0, -1):
        nxt = (w[i] * min(i, s)) / offered
        if nxt < MIN_NORMAL:
            break
        w[i - 1] = nxt
    for i in range(mode + 1, n + 1):
        nxt = (offered * w[i - 1]) / min(i, s)
        if nxt < MIN_NORMAL:
            break
        w[i] = nxt

    total = 0.0
    for i in range(mode):
        total += w[i]
    right_sum = 0.0
    for i in range(n, mode - 1, -1):
        right_sum += w[i]
    total += right_sum

    pi = np.asarray(w, dtype=np.float64) / total
    return pi.astype(dtype)


def build_generator(step: StepParams) -> np.ndarray:
    """Dense generator matrix, for oracles and small-system checks only."""
    n = step.capacity
    q = np.zeros((n + 1, n + 1))
    for i in range(n + 1):
        if i < n:
            q[i, i + 1] = step.arrival_rate
        if i > 0:
            q[i, i - 1] = min(i, step.servers) * step.service_rate
        q[i, i] = -q[i].sum()
    return q

"""Poisson jump-count weights for uniformization.

Builds, for a given mean, the left/right truncation points and a table of
mode-anchored weights normalized by a total weight ``W`` (so an individual
probability is ``w(i)/W``).  Weights are computed recursively outward from
the distribution mode with a large anchor value, which keeps every stored
weight comfortably inside the binary64 normal range without any rescaling.

A second, tighter left point ``l_ssd`` marks where the cumulative left tail
becomes negligible for steady-state bookkeeping; cumulative cdf values are
stored for indices in ``[l_ssd, l)`` and plain weights for ``[l, k]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Anchor placed at the mode before normalization; 2^176 keeps the extreme
# weights between ~1e-35 and ~1e58 for all admissible means.
MODE_ANCHOR = float.fromhex("0x1.0p176")

# Temporary window sizing: count = floor(sqrt(mean) * WINDOW_PER_SQRT) +
# WINDOW_PAD weights, starting at mode + WINDOW_SHIFT - count // 2.
WINDOW_PER_SQRT = 30
WINDOW_PAD = 44
WINDOW_SHIFT = 21

# Window-index arithmetic is only validated up to sqrt(2^63 - 1) / 2.
MAX_MEAN = math.sqrt(2.0**63 - 1.0) / 2.0

# Tolerances below this are indistinguishable from zero for the cdf loops.
MIN_EPSILON = 1e-50


class MeanRangeError(ValueError):
    """Mean too large for the weight-window index arithmetic."""


@dataclass(frozen=True)
class PoissonWeights:
    """Truncated, W-normalized Poisson weight table.

    ``weights[i - l_ssd]`` holds the cumulative cdf weight for indices in
    ``[l_ssd, l)`` and the individual probability weight for ``[l, k]``.
    A rejected construction carries ``total_weight = nan`` and reports
    ``valid = False``; its accessors all return 0.
    """

    mean: float
    l_ssd: int
    l: int
    k: int
    weights: np.ndarray
    total_weight: float

    @property
    def valid(self) -> bool:
        return math.isfinite(self.total_weight)

    @property
    def span(self) -> int:
        """Number of summed terms, k - l + 1."""
        return self.k - self.l + 1

    def raw_weight(self, i: int) -> float:
        """Unnormalized weight for index i; pair with total_weight."""
        if not self.valid or not self.l_ssd <= i <= self.k:
            return 0.0
        return float(self.weights[i - self.l_ssd])

    def weighted(self, value: float, i: int) -> float:
        """value * pmf(i), multiplication ordered to avoid overflow."""
        if not self.valid or not self.l <= i <= self.k:
            return 0.0
        w = float(self.weights[i - self.l_ssd])
        if value > self.total_weight:
            return (value / self.total_weight) * w
        return (value * w) / self.total_weight

    def pmf(self, i: int) -> float:
        """Probability of i events; 0 outside [l, k]."""
        return self.weighted(1.0, i)

    def essd(self, s_index: int) -> float:
        """Cumulative cdf up to s_index for s_index in [l_ssd, l); else 0."""
        if not self.valid or not self.l_ssd <= s_index < self.l:
            return 0.0
        return float(self.weights[s_index - self.l_ssd]) / self.total_weight


def _rejected(mean: float) -> PoissonWeights:
    return PoissonWeights(mean, 0, 0, 0, np.zeros(1), math.nan)


def build_poisson_weights(
    mean: float, epsilon: float, epsilon_ssd: float
) -> PoissonWeights:
    """Compute truncation points and weights for the given mean.

    ``epsilon`` bounds the total truncated probability mass (split evenly
    between the two tails); ``epsilon_ssd`` places the tighter left point
    ``l_ssd``.  A non-positive mean or ``epsilon >= 1`` yields a rejected
    (invalid) result; both tolerances are clamped below at 1e-50, and
    ``epsilon_ssd >= epsilon`` collapses ``l_ssd`` onto ``l`` so that
    ``essd`` is 0 everywhere.
    """
    if not mean > 0.0 or not epsilon < 1.0:
        return _rejected(mean)
    if mean > MAX_MEAN:
        raise MeanRangeError(f"mean {mean:g} exceeds supported bound {MAX_MEAN:.4g}")
    if epsilon < MIN_EPSILON:
        epsilon = MIN_EPSILON
    if epsilon_ssd < MIN_EPSILON:
        epsilon_ssd = MIN_EPSILON
    if not epsilon_ssd < epsilon:
        epsilon_ssd = epsilon

    mode = int(math.floor(mean))
    count = int(math.sqrt(mean) * WINDOW_PER_SQRT) + WINDOW_PAD
    first = mode + WINDOW_SHIFT - count // 2
    if first < 0:
        first = 0

    tw = [0.0] * count
    anchor = mode - first
    tw[anchor] = MODE_ANCHOR
    for j in range(anchor, 0, -1):
        tw[j - 1] = (tw[j] * (j + first)) / mean
    for j in range(anchor + 1, count):
        tw[j] = (mean * tw[j - 1]) / (j + first)

    # Total weight: left half ascending, right half descending, so both
    # partial sums accumulate smallest terms first.
    total = 0.0
    for j in range(anchor):
        total += tw[j]
    right_sum = 0.0
    for j in range(count - 1, anchor - 1, -1):
        right_sum += tw[j]
    total += right_sum

    threshold = (epsilon_ssd * total) / 2.0
    i = 0
    cdf = tw[0]
    while cdf < threshold:
        i += 1
        cdf += tw[i]
    l_ssd = i + first
    cdf_at_l_ssd = cdf

    threshold = (epsilon * total) / 2.0
    while cdf < threshold:
        i += 1
        cdf += tw[i]
    left = i + first

    i = count - 1
    tail = tw[i]
    while tail < threshold:
        i -= 1
        tail += tw[i]
    right = i + first

    stored = np.empty(right - l_ssd + 1)
    stored[0] = cdf_at_l_ssd
    for j in range(l_ssd + 1, left):
        stored[j - l_ssd] = stored[j - l_ssd - 1] + tw[j - first]
    stored[left - l_ssd :] = tw[left - first : right - first + 1]
    return PoissonWeights(mean, l_ssd, left, right, stored, total)

"""Decision-facing quantities derived from state distributions."""

from __future__ import annotations

import math

import numpy as np

from .scenario import Timeline


def expected_state(p: np.ndarray) -> float:
    """Mean number in system, accumulated in binary64."""
    v = np.asarray(p, np.float64)
    return float(np.dot(np.arange(len(v), dtype=np.float64), v))


def tail_probability(p: np.ndarray) -> float:
    """Probability of the last (capacity) state."""
    return float(p[-1])


def service_level(p: np.ndarray, servers: int, service_rate: float, wait: float) -> float:
    """Probability a virtual arrival waits at most ``wait`` time units.

    An arrival finding j >= servers in the system waits for j - servers + 1
    service completions, which at full occupancy arrive as a Poisson stream
    of rate servers * service_rate.  The per-state waiting probabilities are
    built by the forward term recurrence of that Poisson cdf, so one pass
    covers all states.  Exact for the no-abandonment model; the last state's
    blocked arrivals are counted as waiting arrivals.
    """
    if wait < 0.0:
        raise ValueError("wait must be >= 0")
    v = np.asarray(p, np.float64)
    n = len(v) - 1
    total = float(v[: min(servers, n + 1)].sum())
    if servers > n:
        return total
    x = servers * service_rate * wait
    term = math.exp(-x)  # Poisson(x) pmf at 0; underflows to 0 for huge x
    cdf = term
    for j in range(servers, n + 1):
        # P(wait <= d | j in system) = P(N(d) >= j - servers + 1)
        total += float(v[j]) * (1.0 - cdf)
        k = j - servers + 1
        term *= x / k
        cdf += term
    return total


def error_series(run: Timeline, reference: Timeline) -> tuple[np.ndarray, np.ndarray]:
    """Per-record |ES - ES_ref| and max-abs distribution error vs a reference.

    Both timelines must sit on the same time grid.
    """
    if len(run.records) != len(reference.records):
        raise ValueError("timelines have different lengths")
    if not np.allclose(run.times, reference.times, rtol=0.0, atol=1e-9):
        raise ValueError("timelines are on different time grids")
    es_err = np.empty(len(run.records))
    p_err = np.empty(len(run.records))
    for i, (a, b) in enumerate(zip(run.records, reference.records)):
        es_err[i] = abs(expected_state(a.p) - expected_state(b.p))
        p_err[i] = float(np.max(np.abs(a.p - b.p)))
    return es_err, p_err

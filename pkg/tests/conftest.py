"""Shared high-precision oracles for the test suite."""

from __future__ import annotations

import mpmath as mp
import numpy as np
import pytest

mp.mp.dps = 40


def poisson_pmf_exact(mean: float, i: int) -> mp.mpf:
    m = mp.mpf(mean)
    return mp.exp(-m + i * mp.log(m) - mp.loggamma(i + 1))


def poisson_cdf_exact(mean: float, i: int) -> mp.mpf:
    """P(X <= i) for X ~ Poisson(mean); exact via the regularized gamma."""
    if i < 0:
        return mp.mpf(0)
    return mp.gammainc(i + 1, mp.mpf(mean), mp.inf, regularized=True)


def poisson_tail_exact(mean: float, i: int) -> mp.mpf:
    """P(X > i)."""
    return mp.gammainc(i + 1, 0, mp.mpf(mean), regularized=True)


def stationary_exact(arrival: float, service: float, servers: int, capacity: int) -> np.ndarray:
    """Stationary M/M/s/n distribution evaluated in high precision."""
    a = mp.mpf(arrival) / mp.mpf(service)
    weights = []
    for k in range(capacity + 1):
        if k <= servers:
            w = a**k / mp.factorial(k)
        else:
            w = a**k / (mp.mpf(servers) ** (k - servers) * mp.factorial(servers))
        weights.append(w)
    total = mp.fsum(weights)
    return np.array([float(w / total) for w in weights])


@pytest.fixture(scope="session")
def rng() -> np.random.Generator:
    return np.random.default_rng(20260809)

"""Empirical tail-risk measures and the volatility-scaled ES target.

Returns are kept in return space throughout: losses are negative numbers,
so an Expected Shortfall of -0.04 means an average tail loss of 4%.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateVolatilityError, EmptySampleError, EsQuboError, ZeroTargetError


@dataclass(frozen=True)
class RiskConfig:
    """Tail probability plus the frozen crisis-baseline benchmark statistics."""

    alpha: float = 0.01
    baseline_sigma: float = 1.0
    baseline_es: float = -1.0

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise EsQuboError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.baseline_sigma > 0:
            raise EsQuboError(f"baseline_sigma must be > 0, got {self.baseline_sigma}")
        if not self.baseline_es < 0:
            raise EsQuboError(f"baseline_es must be < 0, got {self.baseline_es}")


def _check_sample(sample, alpha: float) -> np.ndarray:
    s = np.asarray(sample, dtype=float).ravel()
    if s.size == 0:
        raise EmptySampleError("sample is empty")
    if not 0 < alpha < 1:
        raise EsQuboError(f"alpha must lie in (0, 1), got {alpha}")
    return s


def tail_count(n: int, alpha: float) -> int:
    """Number of order statistics in the alpha tail: ceil(alpha*n), at least 1."""
    return max(1, math.ceil(alpha * n))


def expected_shortfall(sample, alpha: float) -> float:
    """Mean of the ``ceil(alpha * W)`` smallest values of ``sample``."""
    s = _check_sample(sample, alpha)
    k = tail_count(s.size, alpha)
    tail = np.partition(s, k - 1)[:k]
    return math.fsum(tail.tolist()) / k


def value_at_risk(sample, alpha: float) -> float:
    """The ``ceil(alpha * W)``-th smallest value (empirical lower quantile)."""
    s = _check_sample(sample, alpha)
    k = tail_count(s.size, alpha)
    return float(np.partition(s, k - 1)[k - 1])


def volatility(sample) -> float:
    s = np.asarray(sample, dtype=float).ravel()
    if s.size < 2:
        raise EmptySampleError("volatility needs at least 2 observations")
    return float(s.std(ddof=1))


def es_target(config: RiskConfig, benchmark_sigma: float) -> float:
    """Baseline ES scaled by baseline_sigma / benchmark_sigma.

    Calm windows (small benchmark_sigma) get a larger risk budget, volatile
    ones a smaller one.
    """
    if not benchmark_sigma > 0:
        raise DegenerateVolatilityError(
            f"benchmark volatility is {benchmark_sigma}; cannot scale the ES target"
        )
    return config.baseline_sigma / benchmark_sigma * config.baseline_es


def converged(es_value: float, es_target: float, eta: float) -> bool:
    if es_target == 0:
        raise ZeroTargetError("ES target is zero")
    return abs(1.0 - es_value / es_target) <= eta


def baseline_config(benchmark_returns, alpha: float = 0.01) -> RiskConfig:
    """Freeze sigma and ES of the benchmark over a baseline (crisis) period."""
    r = np.asarray(benchmark_returns, dtype=float)
    sigma = volatility(r)
    es = expected_shortfall(r, alpha)
    if not sigma > 0:
        raise DegenerateVolatilityError("baseline benchmark volatility is zero")
    if not es < 0:
        raise EsQuboError(f"baseline ES must be negative (a loss), got {es}")
    return RiskConfig(alpha=alpha, baseline_sigma=sigma, baseline_es=es)

"""Expected-Shortfall-targeted allocation: the per-window outer loop.

For each window the return target ``rho`` starts at the cross-asset mean
return. Every iteration compiles the penalised QUBO for the current
``rho``, solves it, decodes the weights and measures the in-window ES of
the portfolio returns. Too much tail risk lowers ``rho``; too little
raises it; landing inside the ``eta`` band stops the loop.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qubo, risk
from .encoding import Encoding, decode
from .market_data import ReturnsPanel, WindowSpec, WindowStats, window_stats, windows
from .solver import solve
from .errors import EsQuboError

RHO_FLOOR = 1e-6


@dataclass(frozen=True)
class SolverSettings:
    backend: str = "auto"
    seed: int = 42
    num_reads: int = 20
    sweeps: int = 200


@dataclass(frozen=True)
class AllocatorConfig:
    risk: risk.RiskConfig
    eta: float = 0.05
    rho_step: float = 0.05
    max_iters: int = 60
    bits_per_weight: int = 4
    solver: SolverSettings = field(default_factory=SolverSettings)
    # fixed (penalty_budget, penalty_return); None -> default_penalties per iteration
    penalties: tuple[float, float] | None = None

    def __post_init__(self):
        if not 0 < self.eta < 1:
            raise EsQuboError(f"eta must lie in (0, 1), got {self.eta}")
        if not 0 < self.rho_step < 1:
            raise EsQuboError(f"rho_step must lie in (0, 1), got {self.rho_step}")
        if self.max_iters < 1:
            raise EsQuboError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.bits_per_weight < 1:
            raise EsQuboError(f"bits_per_weight must be >= 1, got {self.bits_per_weight}")


@dataclass(frozen=True)
class IterationTrace:
    iteration: int
    rho: float
    rho_step: float
    weights: tuple[float, ...]
    bits: str
    realized_es: float
    target_es: float
    ratio: float
    action: str  # "lower", "raise" or "accept"
    backend: str
    energy: float


@dataclass(frozen=True)
class AllocationRecord:
    window_index: int
    weights: tuple[float, ...]
    cash_weight: float
    realized_es: float
    target_es: float
    converged: bool
    rho_floored: bool
    trace: tuple[IterationTrace, ...]

    @property
    def iterations(self) -> int:
        return len(self.trace)


def initial_rho(mu) -> tuple[float, bool]:
    """Mean of the asset means, floored at a small positive value.

    Returns the starting target and whether the floor was applied.
    """
    rho = float(np.mean(mu))
    if rho <= 0:
        return max(rho, RHO_FLOOR), True
    return rho, False


def classify(realized_es: float, target_es: float, eta: float) -> tuple[float, str]:
    """Band test on |ES| / |target|.

    A non-negative realized ES (no tail loss at all) means the portfolio
    takes less risk than any negative target, so it is sent up.
    """
    ratio = abs(realized_es) / abs(target_es)
    if realized_es >= 0 > target_es:
        return ratio, "raise"
    if ratio > 1 + eta:
        return ratio, "lower"
    if ratio < 1 - eta:
        return ratio, "raise"
    return ratio, "accept"


def allocate_window(stats: WindowStats, window_returns, config: AllocatorConfig) -> AllocationRecord:
    r = np.asarray(window_returns, dtype=float)
    n = stats.mu.shape[0]
    if r.ndim != 2 or r.shape[0] != n or stats.cov.shape != (n, n):
        raise EsQuboError(
            f"window returns of shape {r.shape} do not match {n} assets in the statistics"
        )
    target = risk.es_target(config.risk, stats.benchmark_sigma)
    enc = Encoding(n, config.bits_per_weight)
    s = config.solver

    rho, floored = initial_rho(stats.mu)
    step = config.rho_step
    trace: list[IterationTrace] = []
    prev_action = None
    for it in range(config.max_iters):
        if config.penalties is None:
            lam_b, lam_r = qubo.default_penalties(stats.cov, stats.mu, rho)
        else:
            lam_b, lam_r = config.penalties
        problem = qubo.build(enc, stats.cov, stats.mu, rho, lam_b, lam_r)
        sol = solve(problem, s.backend, seed=s.seed, num_reads=s.num_reads, sweeps=s.sweeps)
        w = decode(enc, sol.x)
        es = risk.expected_shortfall(w @ r, config.risk.alpha)
        ratio, action = classify(es, target, config.eta)
        trace.append(
            IterationTrace(
                iteration=it,
                rho=rho,
                rho_step=step,
                weights=tuple(float(v) for v in w),
                bits="".join(str(int(b)) for b in sol.x),
                realized_es=es,
                target_es=target,
                ratio=ratio,
                action=action,
                backend=sol.backend_name,
                energy=sol.energy,
            )
        )
        if action == "accept":
            break
        # overshoot across the band: halve the step from here on
        if prev_action is not None and prev_action != action:
            step /= 2
        prev_action = action
        rho = rho * (1 - step) if action == "lower" else rho * (1 + step)

    final = trace[-1]
    done = final.action == "accept"
    chosen = final if done else min(trace, key=lambda t: (abs(1 - t.ratio), t.iteration))
    return AllocationRecord(
        window_index=stats.window_index,
        weights=chosen.weights,
        cash_weight=1.0 - float(sum(chosen.weights)),
        realized_es=chosen.realized_es,
        target_es=target,
        converged=done,
        rho_floored=floored,
        trace=tuple(trace),
    )


def allocate_series(
    panel: ReturnsPanel, spec: WindowSpec, config: AllocatorConfig
) -> list[AllocationRecord]:
    """Run the window loop independently on every rolling window, in order."""
    records = []
    for k, cols in windows(panel, spec):
        stats = window_stats(panel, cols, window_index=k)
        records.append(allocate_window(stats, panel.values[:, cols.start:cols.stop], config))
    return records

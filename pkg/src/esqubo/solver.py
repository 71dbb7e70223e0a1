"""Classical QUBO backends: an exhaustive oracle and simulated annealing.

Bit vectors are ordered lexicographically in asset-major layout; both
backends break energy ties toward the lexicographically smallest state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qubo import QuboProblem, energies, energy
from .errors import EsQuboError, ProblemTooLargeError, UnknownBackendError

EXHAUSTIVE_LIMIT = 24
AUTO_EXHAUSTIVE_LIMIT = 16
BACKENDS = ("exhaustive", "annealing", "auto")

_CHUNK_BITS = 16
_HOT_SAMPLES = 100
_COLD_RATIO = 1e-3


@dataclass(frozen=True)
class SolveRequest:
    problem: QuboProblem
    seed: int = 42
    num_reads: int = 20
    sweeps: int = 200

    def __post_init__(self):
        if self.seed < 0:
            raise EsQuboError(f"seed must be non-negative, got {self.seed}")
        if self.num_reads < 1 or self.sweeps < 1:
            raise EsQuboError(
                f"num_reads and sweeps must be >= 1, got {self.num_reads}, {self.sweeps}"
            )


@dataclass(frozen=True)
class BitSolution:
    x: np.ndarray
    energy: float
    reads_used: int
    backend_name: str

    def __post_init__(self):
        self.x.setflags(write=False)


def _states(start: int, stop: int, n: int) -> np.ndarray:
    """Bit vectors for integers [start, stop); bit 0 is the most significant."""
    m = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((m[:, None] >> shifts) & 1).astype(np.int8)


def solve_exhaustive(problem: QuboProblem) -> BitSolution:
    n = problem.n
    if n > EXHAUSTIVE_LIMIT:
        raise ProblemTooLargeError(
            f"{n} bits is too many for exhaustive search (limit {EXHAUSTIVE_LIMIT})"
        )
    total = 1 << n
    chunk = 1 << min(n, _CHUNK_BITS)
    best_e, best_m = np.inf, 0
    for start in range(0, total, chunk):
        xs = _states(start, start + chunk, n)
        e = energies(problem, xs)
        k = int(np.argmin(e))  # first occurrence = lexicographically smallest
        if e[k] < best_e:
            best_e, best_m = float(e[k]), start + k
    x = _states(best_m, best_m + 1, n)[0]
    return BitSolution(x=x, energy=energy(problem, x), reads_used=1, backend_name="exhaustive")


def _local_fields(q: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """``h[r, u]`` with ``dE(flip u) = (1 - 2 x_u) * h[r, u]``."""
    d = np.diag(q)
    return d + 2.0 * (xs @ q - xs * d)


def hot_temperature(problem: QuboProblem, seed: int, samples: int = _HOT_SAMPLES) -> float:
    """Largest single-flip |dE| seen over random states; 1.0 if the problem is flat."""
    rng = np.random.default_rng([seed, 0x7E11])
    xs = rng.integers(0, 2, size=(samples, problem.n)).astype(float)
    h = _local_fields(problem.q, xs)
    t = float(np.max(np.abs(h))) if h.size else 0.0
    return t if t > 0 else 1.0


def _greedy(q: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Zero-temperature descent: flip the best improving bit until none remains."""
    eps = 1e-12 * max(1.0, float(np.max(np.abs(q))))
    rows = np.arange(xs.shape[0])
    for _ in range(10 * xs.shape[1] * xs.shape[1] + 10):
        h = _local_fields(q, xs)
        de = (1.0 - 2.0 * xs) * h
        u = np.argmin(de, axis=1)
        improving = de[rows, u] < -eps
        if not improving.any():
            break
        r = rows[improving]
        xs[r, u[improving]] = 1.0 - xs[r, u[improving]]
    return xs


def _anneal(q: np.ndarray, temps: np.ndarray, seeds: list[int]) -> np.ndarray:
    """Anneal one read per seed, vectorised across reads; returns final states.

    Each read draws its start state and acceptance variates from its own
    generator, so row ``r`` is identical to annealing ``seeds[r]`` alone.
    """
    n, sweeps = q.shape[0], len(temps)
    xs = np.empty((len(seeds), n))
    uniforms = np.empty((len(seeds), sweeps, n))
    for r, seed in enumerate(seeds):
        rng = np.random.default_rng(seed)
        xs[r] = rng.integers(0, 2, size=n)
        uniforms[r] = rng.random((sweeps, n))

    h = _local_fields(q, xs)
    for s, temp in enumerate(temps):
        for u in range(n):
            de = (1.0 - 2.0 * xs[:, u]) * h[:, u]
            accept = (de <= 0) | (uniforms[:, s, u] < np.exp(-np.maximum(de, 0.0) / temp))
            if not accept.any():
                continue
            d = np.where(accept, 1.0 - 2.0 * xs[:, u], 0.0)
            xs[:, u] += d
            h += 2.0 * d[:, None] * q[u]
            h[:, u] -= 2.0 * d * q[u, u]
    return _greedy(q, xs)


def solve_annealing(request: SolveRequest) -> BitSolution:
    """Single-bit-flip Metropolis annealing with a geometric schedule.

    Read ``r`` is seeded with ``seed + r``; the best read wins, ties going to
    the lexicographically smallest state.
    """
    problem = request.problem
    t_hot = hot_temperature(problem, request.seed)
    temps = np.geomspace(t_hot, _COLD_RATIO * t_hot, request.sweeps)
    seeds = [request.seed + r for r in range(request.num_reads)]
    xs = _anneal(problem.q, temps, seeds)

    candidates = []
    for row in xs:
        x = row.astype(np.int8)
        candidates.append((energy(problem, x), x.tobytes(), x))
    best_e, _, best_x = min(candidates, key=lambda c: (c[0], c[1]))
    return BitSolution(x=best_x, energy=best_e, reads_used=request.num_reads, backend_name="annealing")


def solve(
    problem: QuboProblem,
    backend: str = "auto",
    seed: int = 42,
    num_reads: int = 20,
    sweeps: int = 200,
) -> BitSolution:
    if backend not in BACKENDS:
        raise UnknownBackendError(f"unknown backend {backend!r}; choose one of {BACKENDS}")
    if backend == "auto":
        backend = "exhaustive" if problem.n <= AUTO_EXHAUSTIVE_LIMIT else "annealing"
    if backend == "exhaustive":
        return solve_exhaustive(problem)
    return solve_annealing(SolveRequest(problem, seed=seed, num_reads=num_reads, sweeps=sweeps))

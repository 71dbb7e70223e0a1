"""Penalty compilation of the return-targeted minimum-variance problem.

The constrained program

    minimise  1/2 w'Cw   s.t.  mu'w = rho,  sum(w) = 1,  w >= 0

is turned into an unconstrained binary quadratic objective by substituting
the fixed-point encoding ``w = E x`` and adding squared equality penalties:

    E(x) = 1/2 w'Cw + lam_return (mu'w - rho)^2 + lam_budget (sum(w) - 1)^2

Non-negativity needs no penalty since every encoded weight is >= 0. Linear
terms live on the diagonal of ``q`` (``x_u**2 == x_u``), so
``E(x) = x'qx + offset``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .encoding import Encoding, decode
from .errors import DimensionError, LengthMismatchError, NegativePenaltyError


@dataclass(frozen=True)
class QuboProblem:
    q: np.ndarray
    offset: float
    encoding: Encoding
    penalty_budget: float = 0.0
    penalty_return: float = 0.0
    target_return: float = 0.0

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        n = self.encoding.total_bits
        if q.shape != (n, n):
            raise DimensionError(f"q must be {n}x{n}, got {q.shape}")
        if not np.array_equal(q, q.T):
            raise DimensionError("q must be exactly symmetric")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def n(self) -> int:
        return self.q.shape[0]

    def to_json_dict(self) -> dict:
        """Upper-triangle sparse form; ``[u, u, c]`` entries are linear terms.

        Off-diagonal ``[u, v, c]`` (u < v) contributes ``2*c*x_u*x_v`` to the
        energy, i.e. ``c`` is the symmetric matrix entry, not the pair weight.
        """
        iu, iv = np.triu_indices(self.n)
        entries = [
            [int(u), int(v), float(self.q[u, v])]
            for u, v in zip(iu, iv)
            if self.q[u, v] != 0.0
        ]
        return {"n": self.n, "offset": self.offset, "entries": entries}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, data: dict, encoding: Encoding) -> "QuboProblem":
        n = int(data["n"])
        if n != encoding.total_bits:
            raise DimensionError(f"JSON has n={n} but encoding has {encoding.total_bits} bits")
        q = np.zeros((n, n))
        for u, v, c in data["entries"]:
            q[u, v] = q[v, u] = c
        return cls(q=q, offset=data["offset"], encoding=encoding)


def build(
    enc: Encoding,
    cov,
    mu,
    target_return: float,
    penalty_budget: float,
    penalty_return: float,
) -> QuboProblem:
    cov = np.asarray(cov, dtype=float)
    mu = np.asarray(mu, dtype=float)
    n = enc.n_assets
    if cov.shape != (n, n) or mu.shape != (n,):
        raise DimensionError(
            f"expected cov {n}x{n} and mu of length {n}, got {cov.shape} and {mu.shape}"
        )
    if penalty_budget < 0 or penalty_return < 0:
        raise NegativePenaltyError(
            f"penalties must be >= 0, got budget={penalty_budget}, return={penalty_return}"
        )

    # per-asset quadratic kernel, then lift to bits through w = E x
    kernel = 0.5 * cov + penalty_return * np.outer(mu, mu) + penalty_budget
    e = enc.coefficients()
    q = e.T @ kernel @ e
    linear = e.T @ (-2.0 * penalty_return * target_return * mu - 2.0 * penalty_budget)
    q[np.diag_indices_from(q)] += linear
    q = (q + q.T) / 2
    offset = penalty_return * target_return**2 + penalty_budget
    return QuboProblem(
        q=q,
        offset=offset,
        encoding=enc,
        penalty_budget=float(penalty_budget),
        penalty_return=float(penalty_return),
        target_return=float(target_return),
    )


def energy(problem: QuboProblem, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n,):
        raise LengthMismatchError(f"expected {problem.n} bits, got shape {x.shape}")
    return float(x @ problem.q @ x + problem.offset)


def energies(problem: QuboProblem, xs) -> np.ndarray:
    """Vectorised energy for a stack of bit vectors (rows)."""
    xs = np.asarray(xs, dtype=float)
    return np.einsum("ru,uv,rv->r", xs, problem.q, xs) + problem.offset


def objective(problem: QuboProblem, cov, mu, x) -> float:
    """Direct evaluation of the penalised objective from decoded weights."""
    w = decode(problem.encoding, x)
    cov = np.asarray(cov, dtype=float)
    mu = np.asarray(mu, dtype=float)
    return float(
        0.5 * w @ cov @ w
        + problem.penalty_return * (mu @ w - problem.target_return) ** 2
        + problem.penalty_budget * (w.sum() - 1.0) ** 2
    )


def default_penalties(cov, mu, target_return: float) -> tuple[float, float]:
    """Both penalties at 10x the dominant scale of the objective terms (floor 10)."""
    cov = np.asarray(cov, dtype=float)
    mu = np.asarray(mu, dtype=float)
    scale = max(
        1.0,
        float(np.max(np.abs(0.5 * cov))) if cov.size else 0.0,
        abs(target_return) * (float(np.max(np.abs(mu))) if mu.size else 0.0),
    )
    lam = 10.0 * scale
    return lam, lam

"""Fixed-point binary encoding of long-only portfolio weights.

Each asset weight uses ``B`` bits with significances 1/2, 1/4, ..., 2**-B, so
the representable weights are ``m / 2**B`` for ``m = 0 .. 2**B - 1``. The flat
bit layout is asset-major: bit ``j`` (1-based significance) of asset ``i``
sits at index ``i*B + j - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EsQuboError, LengthMismatchError, WeightRangeError


@dataclass(frozen=True)
class Encoding:
    n_assets: int
    bits_per_weight: int

    def __post_init__(self):
        if self.n_assets < 1:
            raise EsQuboError(f"n_assets must be >= 1, got {self.n_assets}")
        if self.bits_per_weight < 1:
            raise EsQuboError(f"bits_per_weight must be >= 1, got {self.bits_per_weight}")

    @property
    def total_bits(self) -> int:
        return self.n_assets * self.bits_per_weight

    @property
    def levels(self) -> int:
        return 2**self.bits_per_weight

    @property
    def max_weight(self) -> float:
        return 1.0 - 2.0**-self.bits_per_weight

    def coefficients(self) -> np.ndarray:
        """N x total_bits matrix ``C`` with ``w = C @ x``."""
        b = self.bits_per_weight
        c = np.zeros((self.n_assets, self.total_bits))
        sig = 2.0 ** -np.arange(1, b + 1)
        for i in range(self.n_assets):
            c[i, i * b:(i + 1) * b] = sig
        return c


def _bits(enc: Encoding, x) -> np.ndarray:
    x = np.asarray(x)
    if x.shape[-1:] != (enc.total_bits,):
        raise LengthMismatchError(f"expected {enc.total_bits} bits, got shape {x.shape}")
    if not np.all((x == 0) | (x == 1)):
        raise EsQuboError("bit vector entries must be 0 or 1")
    return x.astype(np.int8)


def decode(enc: Encoding, x) -> np.ndarray:
    """Weights ``w_i = sum_j 2**-j * x[i*B + j - 1]``.

    Accepts a single bit vector or a stack of them (last axis = bits).
    """
    x = _bits(enc, x)
    blocks = x.reshape(x.shape[:-1] + (enc.n_assets, enc.bits_per_weight)).astype(float)
    sig = 2.0 ** -np.arange(1, enc.bits_per_weight + 1)
    return blocks @ sig


def encode_nearest(enc: Encoding, w) -> np.ndarray:
    """Bits of the grid point nearest to each weight; ties round down."""
    w = np.asarray(w, dtype=float)
    if w.shape != (enc.n_assets,):
        raise LengthMismatchError(f"expected {enc.n_assets} weights, got shape {w.shape}")
    if np.any(w < 0) or np.any(w >= 1) or not np.all(np.isfinite(w)):
        raise WeightRangeError(f"weights must lie in [0, 1), got {w}")
    b = enc.bits_per_weight
    scaled = w * enc.levels
    m = np.ceil(scaled - 0.5).astype(np.int64)  # half-way goes down
    m = np.clip(m, 0, enc.levels - 1)
    shifts = np.arange(b - 1, -1, -1)
    return ((m[:, None] >> shifts) & 1).astype(np.int8).ravel()


def to_bitstring(x) -> str:
    return "".join("1" if v else "0" for v in np.asarray(x).ravel())


def from_bitstring(s: str) -> np.ndarray:
    if set(s) - {"0", "1"}:
        raise EsQuboError(f"not a bitstring: {s!r}")
    return np.frombuffer(s.encode("ascii"), dtype=np.uint8).astype(np.int8) - ord("0")

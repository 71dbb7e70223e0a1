"""Returns ingestion, rolling windows and per-window statistics."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from datetime import date
from typing import IO, Iterator

import numpy as np

from .errors import (
    DateOrderError,
    DuplicateAssetError,
    DuplicateDateError,
    MalformedCSVError,
    MissingBenchmarkError,
    MissingCellError,
    NonFiniteCellError,
    WindowError,
)


@dataclass(frozen=True)
class ReturnsPanel:
    """Dated asset returns stored asset-major (N assets x T periods).

    ``values[i, k]`` is the return of asset ``asset_ids[i]`` over period
    ``dates[k]``; ``benchmark_index`` selects the market-volatility series.
    """

    dates: tuple[date, ...]
    asset_ids: tuple[str, ...]
    values: np.ndarray
    benchmark_index: int

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise MalformedCSVError("returns must be a 2-D array")
        n, t = values.shape
        if n < 2 or t < 2:
            raise MalformedCSVError(f"need at least 2 assets and 2 periods, got N={n}, T={t}")
        if len(self.asset_ids) != n or len(self.dates) != t:
            raise MalformedCSVError("asset_ids/dates do not match the shape of values")
        if len(set(self.asset_ids)) != n:
            raise DuplicateAssetError(f"duplicate asset ids in {list(self.asset_ids)}")
        for k in range(1, t):
            if self.dates[k] == self.dates[k - 1]:
                raise DuplicateDateError(f"duplicate date {self.dates[k]}")
            if self.dates[k] < self.dates[k - 1]:
                raise DateOrderError(f"dates not increasing at {self.dates[k - 1]} -> {self.dates[k]}")
        if not np.all(np.isfinite(values)):
            raise NonFiniteCellError("returns contain non-finite values")
        if not 0 <= self.benchmark_index < n:
            raise MissingBenchmarkError(f"benchmark_index {self.benchmark_index} out of range")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "asset_ids", tuple(self.asset_ids))

    @property
    def n_assets(self) -> int:
        return self.values.shape[0]

    @property
    def n_periods(self) -> int:
        return self.values.shape[1]

    @property
    def benchmark_id(self) -> str:
        return self.asset_ids[self.benchmark_index]


@dataclass(frozen=True)
class WindowSpec:
    length: int = 252
    stride: int = 21

    def __post_init__(self):
        if self.length < 2:
            raise WindowError(f"window length must be >= 2, got {self.length}")
        if self.stride < 1:
            raise WindowError(f"window stride must be >= 1, got {self.stride}")


@dataclass(frozen=True)
class WindowStats:
    mu: np.ndarray
    cov: np.ndarray
    benchmark_sigma: float
    window_index: int = 0

    def __post_init__(self):
        for arr in (self.mu, self.cov):
            arr.setflags(write=False)


def _parse_date(text: str, row: int) -> date:
    try:
        return date.fromisoformat(text.strip())
    except ValueError:
        raise MalformedCSVError(f"row {row}: cannot parse date {text!r} (expected YYYY-MM-DD)") from None


def load_returns(source: IO[bytes] | IO[str] | bytes | str, benchmark_id: str) -> ReturnsPanel:
    """Parse a returns CSV (T rows x N columns) into an N x T panel.

    ``source`` may be a binary or text stream, or raw bytes/str content.
    The first header must be ``date``; the remaining headers are asset ids.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    if text.startswith("﻿"):
        text = text[1:]

    try:
        rows = list(csv.reader(io.StringIO(text)))
    except csv.Error as exc:
        raise MalformedCSVError(f"unreadable CSV: {exc}") from None
    rows = [r for r in rows if r]  # tolerate trailing blank lines
    if not rows:
        raise MalformedCSVError("empty CSV")

    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "date":
        raise MalformedCSVError(f"first header must be 'date', got {header[:1]}")
    assets = header[1:]
    if len(set(assets)) != len(assets):
        dups = sorted({a for a in assets if assets.count(a) > 1})
        raise DuplicateAssetError(f"duplicate asset columns: {dups}")
    if benchmark_id not in assets:
        raise MissingBenchmarkError(f"benchmark column {benchmark_id!r} not found among {assets}")

    dates: list[date] = []
    seen: set[date] = set()
    data = np.empty((len(rows) - 1, len(assets)))
    for k, row in enumerate(rows[1:], start=1):
        if len(row) != len(header):
            raise MalformedCSVError(f"row {k}: expected {len(header)} cells, got {len(row)}")
        d = _parse_date(row[0], k)
        if d in seen:
            raise DuplicateDateError(f"row {k}: duplicate date {d}")
        if dates and d < dates[-1]:
            raise DateOrderError(f"row {k}: date {d} is earlier than {dates[-1]}")
        seen.add(d)
        dates.append(d)
        for j, cell in enumerate(row[1:]):
            cell = cell.strip()
            if cell == "":
                raise MissingCellError(f"row {k}, column {assets[j]!r}: missing value")
            try:
                v = float(cell)
            except ValueError:
                raise MalformedCSVError(f"row {k}, column {assets[j]!r}: not a number: {cell!r}") from None
            if not math.isfinite(v):
                raise NonFiniteCellError(f"row {k}, column {assets[j]!r}: non-finite value {cell!r}")
            data[k - 1, j] = v

    return ReturnsPanel(
        dates=tuple(dates),
        asset_ids=tuple(assets),
        values=data.T,
        benchmark_index=assets.index(benchmark_id),
    )


def windows(panel: ReturnsPanel, spec: WindowSpec) -> list[tuple[int, range]]:
    """Rolling windows ``[k*stride, k*stride + length)`` that fit in the series."""
    t = panel.n_periods
    if spec.length > t:
        raise WindowError(f"window length {spec.length} exceeds series length {t}")
    return list(_iter_windows(t, spec))


def _iter_windows(t: int, spec: WindowSpec) -> Iterator[tuple[int, range]]:
    k = 0
    while k * spec.stride + spec.length <= t:
        start = k * spec.stride
        yield k, range(start, start + spec.length)
        k += 1


def window_stats(panel: ReturnsPanel, cols: range, window_index: int = 0) -> WindowStats:
    """Mean vector, sample covariance (W-1 denominator) and benchmark sigma."""
    if len(cols) < 2:
        raise WindowError(f"window needs at least 2 periods, got {len(cols)}")
    r = panel.values[:, cols.start:cols.stop:cols.step]
    w = r.shape[1]
    mu = r.mean(axis=1)
    dev = r - mu[:, None]
    cov = dev @ dev.T / (w - 1)
    cov = (cov + cov.T) / 2
    b = panel.benchmark_index
    return WindowStats(
        mu=mu,
        cov=cov,
        benchmark_sigma=float(np.sqrt(max(cov[b, b], 0.0))),
        window_index=window_index,
    )

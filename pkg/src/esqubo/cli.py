"""Command-line harness: ``esqubo backtest`` and ``esqubo dump-qubo``.

Settings come from an optional flat ``key=value`` file (``--config``) with
command-line flags taking precedence. Exit status of ``backtest``: 0 when
every window converged, 2 when any did not, 1 on error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from datetime import date
from pathlib import Path

import numpy as np

from . import qubo, risk
from .allocator import AllocationRecord, AllocatorConfig, SolverSettings, allocate_series, initial_rho
from .encoding import Encoding
from .errors import EsQuboError
from .market_data import ReturnsPanel, WindowSpec, load_returns, window_stats, windows
from .solver import BACKENDS

RESULTS_JSON = "results.json"
RESULTS_CSV = "allocations.csv"


@dataclass(frozen=True)
class RunConfig:
    input: str = ""
    benchmark: str = "SPY"
    baseline_start: str = ""
    baseline_end: str = ""
    alpha: float = 0.01
    bits: int = 4
    window: int = 252
    stride: int = 21
    eta: float = 0.05
    rho_step: float = 0.05
    max_iters: int = 60
    backend: str = "auto"
    seed: int = 42
    reads: int = 20
    sweeps: int = 200
    out: str = "results"

    def to_text(self) -> str:
        return "".join(f"{f.name}={getattr(self, f.name)}\n" for f in dataclasses.fields(self))


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}
_CASTS = {"str": str, "int": int, "float": float}


def parse_config_text(text: str) -> dict:
    """Read ``key=value`` lines; ``#`` starts a comment, blank lines ignored."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise EsQuboError(f"config line {lineno}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELDS:
            raise EsQuboError(f"config line {lineno}: unknown key {key!r}")
        values[key] = value
    return values


def make_config(values: dict) -> RunConfig:
    typed = {}
    for key, value in values.items():
        cast = _CASTS[_FIELDS[key].type]
        try:
            typed[key] = cast(value)
        except ValueError:
            raise EsQuboError(f"{key}: cannot interpret {value!r} as {_FIELDS[key].type}") from None
    return RunConfig(**typed)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value settings file; flags override it")
    p.add_argument("--input", help="returns CSV (date column + one column per asset)")
    p.add_argument("--benchmark", help="benchmark column id")
    p.add_argument("--baseline-start", help="first date of the baseline period (YYYY-MM-DD)")
    p.add_argument("--baseline-end", help="last date of the baseline period (YYYY-MM-DD)")
    p.add_argument("--alpha", type=float, help="ES tail probability (default 0.01)")
    p.add_argument("--bits", type=int, help="bits per asset weight (default 4)")
    p.add_argument("--window", type=int, help="window length in periods (default 252)")
    p.add_argument("--stride", type=int, help="periods between windows (default 21)")
    p.add_argument("--eta", type=float, help="convergence band (default 0.05)")
    p.add_argument("--rho-step", type=float, help="relative return-target step (default 0.05)")
    p.add_argument("--max-iters", type=int, help="iteration cap per window (default 60)")
    p.add_argument("--backend", choices=BACKENDS, help="QUBO solver (default auto)")
    p.add_argument("--seed", type=int, help="annealing seed (default 42)")
    p.add_argument("--reads", type=int, help="annealing restarts (default 20)")
    p.add_argument("--sweeps", type=int, help="annealing sweeps per read (default 200)")
    p.add_argument("--out", help="output directory for backtest results")
    p.add_argument("--print-config", action="store_true", help="print resolved settings and exit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="esqubo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    bt = sub.add_parser("backtest", help="run the rolling-window allocation")
    _add_common(bt)
    dq = sub.add_parser("dump-qubo", help="print one window's QUBO as JSON")
    _add_common(dq)
    dq.add_argument("--window-index", type=int, default=0)
    dq.add_argument("--rho", type=float, help="return target (default: window's starting target)")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        values.update(parse_config_text(Path(args.config).read_text(encoding="utf-8")))
    for name in _FIELDS:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = str(v)
    return make_config(values)


def _load_panel(cfg: RunConfig) -> ReturnsPanel:
    if not cfg.input:
        raise EsQuboError("input: no returns file given (--input)")
    try:
        with open(cfg.input, "rb") as fh:
            return load_returns(fh, cfg.benchmark)
    except OSError as exc:
        raise EsQuboError(f"input: cannot read {cfg.input!r}: {exc.strerror}") from None


def _parse_day(text: str, name: str) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise EsQuboError(f"{name}: not a YYYY-MM-DD date: {text!r}") from None


def baseline_risk(panel: ReturnsPanel, cfg: RunConfig) -> risk.RiskConfig:
    """Benchmark sigma and ES over the inclusive baseline date range.

    An empty range bound defaults to the corresponding end of the data.
    """
    first, last = panel.dates[0], panel.dates[-1]
    start = _parse_day(cfg.baseline_start, "baseline_start") if cfg.baseline_start else first
    end = _parse_day(cfg.baseline_end, "baseline_end") if cfg.baseline_end else last
    if start > end:
        raise EsQuboError(f"baseline: start {start} is after end {end}")
    if start < first or end > last:
        raise EsQuboError(f"baseline: range {start}..{end} lies outside the data ({first}..{last})")
    mask = np.array([start <= d <= end for d in panel.dates])
    if mask.sum() < 2:
        raise EsQuboError(f"baseline: range {start}..{end} holds fewer than 2 periods")
    series = panel.values[panel.benchmark_index, mask]
    try:
        return risk.baseline_config(series, cfg.alpha)
    except EsQuboError as exc:
        raise EsQuboError(f"baseline: {exc}") from None


def allocator_config(cfg: RunConfig, risk_cfg: risk.RiskConfig) -> AllocatorConfig:
    return AllocatorConfig(
        risk=risk_cfg,
        eta=cfg.eta,
        rho_step=cfg.rho_step,
        max_iters=cfg.max_iters,
        bits_per_weight=cfg.bits,
        solver=SolverSettings(cfg.backend, cfg.seed, cfg.reads, cfg.sweeps),
    )


def _trace_dict(t) -> dict:
    d = dataclasses.asdict(t)
    d["weights"] = list(t.weights)
    return d


def results_document(
    cfg: RunConfig, panel: ReturnsPanel, risk_cfg: risk.RiskConfig, records: list[AllocationRecord]
) -> dict:
    spans = dict(windows(panel, WindowSpec(cfg.window, cfg.stride)))
    out = []
    for rec in records:
        cols = spans[rec.window_index]
        out.append(
            {
                "window_index": rec.window_index,
                "start_date": panel.dates[cols.start].isoformat(),
                "end_date": panel.dates[cols.stop - 1].isoformat(),
                "weights": dict(zip(panel.asset_ids, rec.weights)),
                "cash_weight": rec.cash_weight,
                "realized_es": rec.realized_es,
                "target_es": rec.target_es,
                "converged": rec.converged,
                "rho_floored": rec.rho_floored,
                "iterations": rec.iterations,
                "trace": [_trace_dict(t) for t in rec.trace],
            }
        )
    settings = dataclasses.asdict(cfg)
    del settings["out"]  # keeps results independent of where they are written
    return {
        "config": settings,
        "assets": list(panel.asset_ids),
        "benchmark": panel.benchmark_id,
        "baseline": {"sigma": risk_cfg.baseline_sigma, "es": risk_cfg.baseline_es},
        "bit_layout": "asset-major; bit j of asset i at index i*bits + j - 1, weight 2**-j",
        "windows": out,
    }


def results_csv(doc: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    assets = doc["assets"]
    writer.writerow(
        ["window_index", "start_date", "end_date", *(f"w_{a}" for a in assets),
         "cash_weight", "realized_es", "target_es", "converged", "iterations"]
    )
    for w in doc["windows"]:
        writer.writerow(
            [w["window_index"], w["start_date"], w["end_date"],
             *(repr(w["weights"][a]) for a in assets),
             repr(w["cash_weight"]), repr(w["realized_es"]), repr(w["target_es"]),
             int(w["converged"]), w["iterations"]]
        )
    return buf.getvalue()


def _write_atomic(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def run_backtest(cfg: RunConfig) -> int:
    panel = _load_panel(cfg)
    risk_cfg = baseline_risk(panel, cfg)
    spec = WindowSpec(cfg.window, cfg.stride)
    records = allocate_series(panel, spec, allocator_config(cfg, risk_cfg))
    doc = results_document(cfg, panel, risk_cfg, records)
    json_text = json.dumps(doc, indent=2) + "\n"
    csv_text = results_csv(doc)

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_atomic(out / RESULTS_JSON, json_text)
    _write_atomic(out / RESULTS_CSV, csv_text)
    n_ok = sum(r.converged for r in records)
    print(f"{n_ok}/{len(records)} windows converged; results in {out}", file=sys.stderr)
    return 0 if n_ok == len(records) else 2


def dump_qubo(cfg: RunConfig, window_index: int = 0, rho: float | None = None) -> str:
    panel = _load_panel(cfg)
    spans = dict(windows(panel, WindowSpec(cfg.window, cfg.stride)))
    if window_index not in spans:
        raise EsQuboError(f"window_index: {window_index} not in 0..{len(spans) - 1}")
    stats = window_stats(panel, spans[window_index], window_index)
    if rho is None:
        rho, _ = initial_rho(stats.mu)
    lam_b, lam_r = qubo.default_penalties(stats.cov, stats.mu, rho)
    problem = qubo.build(Encoding(panel.n_assets, cfg.bits), stats.cov, stats.mu, rho, lam_b, lam_r)
    return problem.to_json()


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.print_config:
            sys.stdout.write(cfg.to_text())
            return 0
        if args.command == "backtest":
            return run_backtest(cfg)
        sys.stdout.write(dump_qubo(cfg, args.window_index, args.rho) + "\n")
        return 0
    except (EsQuboError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

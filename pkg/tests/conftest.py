from datetime import date, timedelta

import numpy as np
import pytest

from esqubo.allocator import AllocatorConfig, SolverSettings
from esqubo.market_data import ReturnsPanel, window_stats
from esqubo.risk import RiskConfig, expected_shortfall


def make_dates(t, start=date(2020, 1, 1)):
    return tuple(start + timedelta(days=k) for k in range(t))


def two_asset_window(seed=7, w=60, alpha=0.05, target_weight=0.5):
    """Riskless asset (all zeros) plus a volatile benchmark.

    Portfolio ES is exactly weight * ES(benchmark), so the baseline ES is set
    to put the dynamic target at ``target_weight`` of the benchmark's ES.
    """
    rng = np.random.default_rng(seed)
    vol = 0.01 + 0.02 * rng.standard_normal(w)
    values = np.vstack([np.zeros(w), vol])
    panel = ReturnsPanel(make_dates(w), ("CASH", "SPY"), values, 1)
    stats = window_stats(panel, range(0, w))
    risk_cfg = RiskConfig(
        alpha=alpha,
        baseline_sigma=stats.benchmark_sigma,
        baseline_es=target_weight * expected_shortfall(vol, alpha),
    )
    return panel, stats, risk_cfg


def exhaustive_config(risk_cfg, **kw):
    return AllocatorConfig(risk=risk_cfg, bits_per_weight=4, solver=SolverSettings(backend="exhaustive"), **kw)


def write_csv(path, panel):
    lines = ["date," + ",".join(panel.asset_ids)]
    for k, d in enumerate(panel.dates):
        lines.append(d.isoformat() + "," + ",".join(repr(float(v)) for v in panel.values[:, k]))
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def small_panel():
    rng = np.random.default_rng(3)
    t = 120
    values = 0.0005 + 0.01 * rng.standard_normal((3, t))
    return ReturnsPanel(make_dates(t), ("BND", "GLD", "SPY"), values, 2)


def cli_panel(w=60, b=30, seed=7):
    """Window rows followed by a baseline stretch scaled so the target is half the benchmark ES."""
    rng = np.random.default_rng(seed)
    vol = 0.01 + 0.02 * rng.standard_normal(w)
    base = rng.standard_normal(b) * 0.02
    alpha = 0.01
    es_w, sd_w = expected_shortfall(vol, alpha), vol.std(ddof=1)
    es_b, sd_b = expected_shortfall(base, alpha), base.std(ddof=1)
    # target = sd_b*c / sd_w * es_b*c, solved for c
    c = np.sqrt(0.5 * es_w * sd_w / (sd_b * es_b))
    spy = np.concatenate([vol, c * base])
    values = np.vstack([np.zeros(w + b), spy])
    panel = ReturnsPanel(make_dates(w + b), ("CASH", "SPY"), values, 1)
    return panel, panel.dates[w].isoformat(), panel.dates[-1].isoformat()


@pytest.fixture
def cli_dataset(tmp_path):
    panel, start, end = cli_panel()
    path = write_csv(tmp_path / "returns.csv", panel)
    args = [
        "--input", str(path), "--benchmark", "SPY",
        "--baseline-start", start, "--baseline-end", end,
        "--window", "60", "--stride", "100", "--backend", "exhaustive",
    ]
    return panel, path, args

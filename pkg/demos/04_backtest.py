# %% [markdown]
# # A rolling-window backtest
#
# Synthetic daily returns for four assets, with a volatility spike in the
# middle of the sample. A rescaled copy of the first year of the benchmark
# stands in for the crisis baseline.

# %%
from datetime import date, timedelta

import numpy as np

from esqubo import AllocatorConfig, ReturnsPanel, SolverSettings, WindowSpec, allocate_series
from esqubo.risk import baseline_config

rng = np.random.default_rng(11)
t = 252 * 3
regime = np.where((np.arange(t) > 400) & (np.arange(t) < 550), 2.5, 1.0)
spy = 0.0004 + 0.011 * regime * rng.standard_normal(t)
values = np.vstack([
    0.0001 + 0.002 * rng.standard_normal(t),            # bonds
    0.0002 + 0.009 * rng.standard_normal(t),            # gold
    0.0003 + 0.4 * spy + 0.008 * rng.standard_normal(t),  # real estate
    spy,
])
dates = tuple(date(2006, 1, 2) + timedelta(days=k) for k in range(t))
panel = ReturnsPanel(dates, ("BND", "GLD", "VNQ", "SPY"), values, 3)

baseline = baseline_config(0.7 * spy[:252], alpha=0.01)
config = AllocatorConfig(risk=baseline, bits_per_weight=4, solver=SolverSettings(backend="auto"))

# %%
records = allocate_series(panel, WindowSpec(length=252, stride=63), config)
for rec in records:
    w = " ".join(f"{v:.3f}" for v in rec.weights)
    print(f"window {rec.window_index}: w=[{w}] cash={rec.cash_weight:+.3f} "
          f"ES={rec.realized_es:+.4f} target={rec.target_es:+.4f} "
          f"iters={rec.iterations} {'ok' if rec.converged else 'not converged'}")

# %% [markdown]
# Windows that end "not converged" are reported with the iterate whose ES
# came closest to the target. Two things cause it: no point of the weight
# grid lands inside the band (a coarser `bits_per_weight` makes this
# common), or the return target needs more multiplicative steps than
# `max_iters` allows.
#
# The same data as a CSV, for the command-line tool:

# %%
from pathlib import Path

out = Path(__file__).with_name("sample_returns.csv")
with out.open("w") as fh:
    fh.write("date," + ",".join(panel.asset_ids) + "\n")
    for k, d in enumerate(panel.dates):
        fh.write(d.isoformat() + "," + ",".join(f"{v:.8f}" for v in panel.values[:, k]) + "\n")
print("wrote", out)

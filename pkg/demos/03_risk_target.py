# %% [markdown]
# # Tail risk and the volatility-scaled target
#
# ES is the mean of the worst `ceil(alpha * W)` returns. The dynamic target
# rescales a crisis-period ES by the ratio of crisis volatility to current
# benchmark volatility, so volatile markets get a smaller loss budget.

# %%
import numpy as np

from esqubo import RiskConfig, es_target, expected_shortfall, value_at_risk
from esqubo.risk import baseline_config

rng = np.random.default_rng(2008)
crisis = 0.03 * rng.standard_t(3, 250)
calm = 0.008 * rng.standard_normal(250)

cfg = baseline_config(crisis, alpha=0.01)
print(f"baseline sigma={cfg.baseline_sigma:.4f}  ES={cfg.baseline_es:.4f}")
print(f"calm:  VaR={value_at_risk(calm, 0.01):.4f}  ES={expected_shortfall(calm, 0.01):.4f}")

# %%
for sigma in (0.005, 0.01, 0.02, 0.04):
    print(f"benchmark sigma {sigma:.3f} -> ES target {es_target(cfg, sigma):+.4f}")

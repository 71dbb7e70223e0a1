# %% [markdown]
# # From weights to bits to a QUBO
#
# Each asset weight is stored in `B` bits with place values 1/2, 1/4, ...,
# so a weight is always one of `0, 1/2**B, ..., 1 - 1/2**B`. Short positions
# cannot be expressed at all.

# %%
import itertools

import numpy as np

from esqubo import Encoding, build, decode, default_penalties, encode_nearest, energy

enc = Encoding(n_assets=3, bits_per_weight=3)
print("bits:", enc.total_bits, "levels per asset:", enc.levels)
x = encode_nearest(enc, [0.3, 0.55, 0.1])
print("nearest grid bits:", x, "->", decode(enc, x))

# %% [markdown]
# A small three-asset minimum-variance problem with a return target `rho`.
# The budget and return constraints become squared penalties.

# %%
cov = np.array([[0.040, 0.006, 0.000],
                [0.006, 0.010, 0.002],
                [0.000, 0.002, 0.0004]])
mu = np.array([0.08, 0.05, 0.02])
rho = 0.05
lam_b, lam_r = default_penalties(cov, mu, rho)
problem = build(enc, cov, mu, rho, lam_b, lam_r)
print("penalties:", lam_b, lam_r, "offset:", problem.offset)

# %% [markdown]
# The compiled energy reproduces the penalised objective on every state.

# %%
worst = 0.0
for bits in itertools.product((0, 1), repeat=enc.total_bits):
    w = decode(enc, bits)
    direct = 0.5 * w @ cov @ w + lam_r * (mu @ w - rho) ** 2 + lam_b * (w.sum() - 1) ** 2
    worst = max(worst, abs(energy(problem, np.array(bits)) - direct))
print(f"max |energy - objective| over {2**enc.total_bits} states: {worst:.2e}")

# %% [markdown]
# The sparse JSON form is what an external annealing service would receive.

# %%
print(problem.to_json()[:200], "...")

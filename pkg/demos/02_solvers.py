# %% [markdown]
# # Exhaustive search versus simulated annealing
#
# The exhaustive backend is the correctness oracle (up to 24 bits). The
# annealer is the stand-in for quantum hardware.

# %%
import time

import numpy as np

from esqubo import Encoding, QuboProblem, SolveRequest, solve, solve_annealing, solve_exhaustive

rng = np.random.default_rng(0)
a = rng.standard_normal((16, 16))
problem = QuboProblem(q=(a + a.T) / 2, offset=0.0, encoding=Encoding(4, 4))

t = time.perf_counter()
exact = solve_exhaustive(problem)
print(f"exhaustive: E={exact.energy:.6f} in {time.perf_counter() - t:.2f}s")

for reads, sweeps in [(1, 10), (5, 50), (20, 200)]:
    t = time.perf_counter()
    sol = solve_annealing(SolveRequest(problem, seed=1, num_reads=reads, sweeps=sweeps))
    gap = sol.energy - exact.energy
    print(f"annealing reads={reads:2d} sweeps={sweeps:3d}: E={sol.energy:.6f} gap={gap:.2e} "
          f"({time.perf_counter() - t:.2f}s)")

# %% [markdown]
# `solve(..., backend="auto")` picks exhaustive up to 16 bits and annealing
# beyond.

# %%
big = rng.standard_normal((40, 40))
big_problem = QuboProblem(q=(big + big.T) / 2, offset=0.0, encoding=Encoding(10, 4))
print(solve(problem).backend_name, solve(big_problem, num_reads=5, sweeps=100).backend_name)

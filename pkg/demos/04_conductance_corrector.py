# %% [markdown]
# Corrector of a random conductance model on a torus
#
# The walk jumps across bond (x, x+e) with probability proportional to its
# conductance.  Solving the Poisson equation for the local drift in the
# environment seen from the particle gives a corrector V with x + V(x)
# harmonic for the walk.

# %%
import numpy as np

from nullhom.rcm import (build_environment, limit_gradient, local_drift, neumann_series,
                         sample_field, solve_poisson)
from nullhom.rcm.checks import HARD_TOLERANCES, verify_field
from nullhom.rng import RandomSource

field = sample_field(2, 8, 1.0, 2.0, RandomSource(4))
env = build_environment(field)
print("chain residuals:", env.residuals())

# %% direct solve against the geometric series at eps = 0.1
d = local_drift(field)
g = solve_poisson(env, d, 0.1)
print("Neumann vs direct:", np.max(np.abs(neumann_series(env, d, 0.1) - g)))

# %% the eps -> 0 limit
corr = limit_gradient(env)
g0 = corr.g
for eps in (0.1, 0.01, 0.001):
    ge = solve_poisson(env, d, eps)
    print(f"eps {eps:<6}: |g_eps - g_0| = {np.max(np.abs((ge - ge[0]) - g0)):.2e}")

# %% every identity in one place
res = verify_field(field)
for k, v in res.items():
    print(f"{k:>22}: {v:.1e}  (tol {HARD_TOLERANCES[k]:.0e})")
print("corrector range:", corr.v.min(axis=0), corr.v.max(axis=0))

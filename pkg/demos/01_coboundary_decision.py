# %% [markdown]
# Deciding whether a Markov random walk is a coboundary
#
# A walk S_n = f(M_0, M_1) + ... + f(M_{n-1}, M_n) driven by a finite chain
# stays bounded exactly when f(s, t) = xi(t) - xi(s) for some potential xi.
# With rational increments the decision is exact.

# %%
from fractions import Fraction

import numpy as np

from nullhom import mrw
from nullhom.rng import RandomSource

P = np.array([[0.2, 0.5, 0.3],
              [0.4, 0.1, 0.5],
              [0.6, 0.4, 0.0]])
chain = mrw.validate_chain(P, labels=["a", "b", "c"])
print("stationary law:", chain.stationary)

# %% a coboundary built from a potential
xi = [Fraction(0), Fraction(1), Fraction(-1, 2)]
f = mrw.make_null_homologous(chain, xi)
dec = mrw.decide_null_homology(chain, f)
print("recovered potential:", [str(x) for x in dec.values[:, 0]])

# %% perturb one edge; the decision now returns a cycle that does not telescope
g = f.perturbed((1, 2), Fraction(1, 2))
cyc = mrw.decide_null_homology(chain, g)
print("cycle", [chain.label(s) for s in cyc.states], "sum", cyc.cycle_sum[0])

# %% the bounded walk stays in a window of width 2 max|xi|, the perturbed one drifts
for name, inc in [("coboundary", f), ("perturbed", g)]:
    traj = mrw.simulate_mrw(chain, inc, 5000, RandomSource(1))
    print(f"{name:>10}: max |S_k| = {np.max(np.abs(traj.values)):.3f}, "
          f"S_n / n = {traj.values[-1, 0] / 5000:+.4f}, "
          f"stationary mean increment = {mrw.mean_increment(chain, inc)[0]:+.4f}")

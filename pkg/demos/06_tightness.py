# %% [markdown]
# Tightness diagnostic
#
# Quantiles of |S_n| across horizons: flat for a coboundary, growing like
# sqrt(n) for a centred non-coboundary and like n with drift.  This is a
# heuristic; tightness has no finite-sample test.

# %%
from fractions import Fraction

import numpy as np

from nullhom import mrw
from nullhom.diagnostics import iid_sampler, lp_bound_check, mrw_sampler, tightness_diagnostic
from nullhom.rng import RandomSource

P = np.array([[0.2, 0.5, 0.3], [0.4, 0.1, 0.5], [0.6, 0.4, 0.0]])
chain = mrw.validate_chain(P)
f = mrw.make_null_homologous(chain, [0, 1, Fraction(-1, 2)])
horizons = (16, 32, 64, 128, 256, 512, 1024)

samplers = {
    "coboundary": mrw_sampler(chain, f),
    "perturbed": mrw_sampler(chain, f.perturbed((1, 2), Fraction(1, 2))),
    "simple walk": iid_sampler([-1, 1]),
}
for name, s in samplers.items():
    rep = tightness_diagnostic(s, horizons, 1000, src=RandomSource(5))
    print(f"{name:>12}: exponent {rep.growth_exponent:+.3f} -> {rep.verdict}")

# %% second moments tell the same story
for name, s in samplers.items():
    print(f"{name:>12}: {lp_bound_check(s, 2, horizons, 1000, RandomSource(6))['verdict']}")

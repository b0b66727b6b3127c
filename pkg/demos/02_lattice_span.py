# %% [markdown]
# Lattice type of a rational walk
#
# Even when S_n is unbounded, its increments can be confined to
# d Z + xi(t) - xi(s).  The largest such d is the gcd of all cycle sums.

# %%
from fractions import Fraction

import numpy as np

from nullhom import mrw

chain = mrw.validate_chain([[0.5, 0.5], [0.5, 0.5]])
for values in [(1, 3), (2, 4), (Fraction(2, 3), Fraction(4, 3))]:
    f = mrw.IncrementFunction.from_function(chain, lambda s, t, v=values: v[t])
    rep = mrw.lattice_span(chain, f)
    print(f"destination increments {tuple(str(v) for v in values)}: span {rep.span}, "
          f"shift {[str(x) for x in rep.shift_mod]}")

# %% a coboundary has span 0
P = np.array([[0.2, 0.5, 0.3], [0.4, 0.1, 0.5], [0.6, 0.4, 0.0]])
chain3 = mrw.validate_chain(P)
f = mrw.make_null_homologous(chain3, [0, 1, Fraction(-1, 2)])
print("coboundary span:", mrw.lattice_span(chain3, f).span)

# %% a shifted coboundary: every step gets +2, so the walk lives on 2Z + xi(M_n) - xi(M_0)
g = mrw.IncrementFunction.from_function(chain3, lambda s, t: f(s, t) + 2)
rep = mrw.lattice_span(chain3, g)
print("span", rep.span, "shift", [str(x) for x in rep.shift_mod])

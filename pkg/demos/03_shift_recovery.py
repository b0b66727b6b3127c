# %% [markdown]
# Recovering the potential from conditional means
#
# For a coboundary, h_n(s) = E[S_n | M_0 = s] = E[xi(M_n) | M_0 = s] - xi(s),
# so h_n(0) - h_n(s) converges to xi(s) at the chain's mixing rate.

# %%
import numpy as np

from nullhom import mrw

P = np.array([[0.2, 0.5, 0.3], [0.4, 0.1, 0.5], [0.6, 0.4, 0.0]])
chain = mrw.validate_chain(P)
xi = np.array([0.0, 1.0, -0.5])
f = mrw.make_null_homologous(chain, xi)
slem = mrw.spectral_radius_second(chain)
print(f"second eigenvalue modulus {slem:.4f}")

# %% error against the exact potential, next to the geometric rate
for h in (1, 2, 4, 8, 16, 32, 64):
    est = mrw.recover_shift_function(chain, f, h).values[:, 0]
    print(f"horizon {h:3d}: error {np.max(np.abs(est - xi)):.2e}   rate {slem ** h:.2e}")

# %% [markdown]
# Quenched walk: law of large numbers, martingale bound and Gaussian limit

# %%
import numpy as np

from nullhom.rcm import constant_field, sample_field
from nullhom.rcm.experiments import azuma_check, clt_experiment, lln_check
from nullhom.rng import RandomSource

flat = constant_field(1, 64)
print("LLN:", {k: v for k, v in lln_check(flat, 5000, 4000, RandomSource(1)).items()
               if k in ("max_abs_S_over_n", "fraction_within_threshold")})
az = azuma_check(flat, 5000, 0.25, 4000, RandomSource(2))
print(f"Azuma: level {az['level']:.0f}, exceedances {az['exceedance_count']}, bound {az['bound']:.2e}")

# %% random conductances: the variance comes from the corrected martingale
field = sample_field(1, 16, 1.0, 3.0, RandomSource(3))
rep = clt_experiment(field, 2000, 10_000, RandomSource(4))
w = field.weights[:, 0]
print("sigma^2 fitted:", rep["sigma_hat"][0][0])
print("sigma^2 exact :", rep["sigma_exact"][0][0])
print("harmonic/arith:", (1 / np.mean(1 / w)) / np.mean(w))
print("KS raw / smoothed:", rep["ks"], rep["ks_smoothed"])

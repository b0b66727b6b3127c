# %% [markdown]
# Shift, partial sums and the pair maps on finite windows

# %%
import numpy as np

from nullhom.maps import PairWindow, compare, lambda_map, s_map, shift_pair
from nullhom.sequences import PathWindow, difference, partial_sums

x = PathWindow(-2, [5, 2, 7, 1, 4])          # x_{-2} .. x_2
s = partial_sums(x)
print("indices ", s.indices())
print("s_n     ", s.values[:, 0])
print("D s     ", difference(s).values[:, 0], "(equals x_{n+1})")

# %% S o Lambda_n = Lambda_{n+1} and S o T = T o S on a random integer window
gen = np.random.default_rng(0)
w = PathWindow(-5, gen.integers(-9, 10, size=(20, 1)))
for n in range(1, 6):
    print(n, compare(s_map(lambda_map(w, n)), lambda_map(w, n + 1)))
p = PairWindow(w, PathWindow(-5, gen.integers(-9, 10, size=(20, 1))))
print("commutation:", compare(s_map(shift_pair(p)), shift_pair(s_map(p))))

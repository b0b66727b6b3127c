from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from nullhom.errors import IndexOutOfWindow, WindowTooShort
from nullhom.sequences import (
    PathWindow, difference, load_window, partial_sums, save_window, shift, unshift,
    window_from_csv, window_to_csv,
)

windows = st.builds(
    lambda off, vals: PathWindow(off, np.array(vals, dtype=np.int64)[:, None]),
    st.integers(-20, 1),
    st.lists(st.integers(-100, 100), min_size=2, max_size=40),
)


def naive_sum(x, n):
    """Direct evaluation of the two-sided convention."""
    if n >= 1:
        return sum(int(x[k][0]) for k in range(1, n + 1))
    if n == 0:
        return 0
    return -sum(int(x[k][0]) for k in range(n + 1, 1))


def test_partial_sums_worked_example():
    x = PathWindow(-2, [5, 2, 7, 1, 4])
    s = partial_sums(x)
    assert s.first == -3 and s.last == 2
    assert s.values[:, 0].tolist() == [-14, -9, -7, 0, 1, 5]


def test_partial_sums_all_ones():
    s = partial_sums(PathWindow(-1, np.ones(4, dtype=int)), -2, 2)
    assert s.values[:, 0].tolist() == [-2, -1, 0, 1, 2]


@given(windows)
def test_partial_sums_match_naive(x):
    s = partial_sums(x)
    for n in s.indices():
        assert s[n][0] == naive_sum(x, n)


@given(windows)
def test_partial_sum_increments_recover_sequence(x):
    s = partial_sums(x)
    assume(len(s) >= 2)
    d = difference(s)
    # (D s)_n = s_{n+1} - s_n = x_{n+1}
    for n in d.indices():
        assert d[n][0] == x[n + 1][0]


@given(windows, st.integers(-5, 5))
def test_shift_relabels(x, k):
    y = shift(x, k)
    for n in y.indices():
        assert np.array_equal(y[n], x[n + k])
    assert unshift(shift(x)) == x


def test_difference_needs_two_points():
    with pytest.raises(WindowTooShort):
        difference(PathWindow(0, [1]))


def test_out_of_window():
    x = PathWindow(2, [1, 2, 3])
    with pytest.raises(IndexOutOfWindow):
        partial_sums(x, 0, 3)
    with pytest.raises(IndexOutOfWindow):
        x[7]


def test_window_is_read_only():
    x = PathWindow(0, [1, 2])
    with pytest.raises(ValueError):
        x.values[0, 0] = 5


def test_csv_round_trip(tmp_path):
    x = PathWindow(-1, np.array([[Fraction(1, 2), 3], [Fraction(-2, 3), 0]], dtype=object))
    assert window_from_csv(window_to_csv(x)) == x
    y = PathWindow(4, np.array([[0.25], [1.5], [-3.0]]))
    save_window(y, tmp_path / "w.csv")
    assert load_window(tmp_path / "w.csv") == y

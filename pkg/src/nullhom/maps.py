"""Bivariate sequence maps on finite windows.

A :class:`PairWindow` stores two sequences ``(x, y)`` on a common index range.
The maps are

* ``lambda_map(x, k) = (T^k x, x + T x + ... + T^{k-1} x)``
* ``s_map(x, y) = (T x, x + y)``
* ``shift_pair(x, y) = (T x, T y)``

and satisfy ``s_map o lambda_map(., n) = lambda_map(., n + 1)`` and
``s_map o shift_pair = shift_pair o s_map``.  Every map consumes some of the
window's edge, so results are compared on the overlap of their index ranges.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import WindowTooShort
from .sequences import PathWindow


@dataclass(frozen=True, eq=False)
class PairWindow:
    x: PathWindow
    y: PathWindow

    def __post_init__(self):
        if self.x.offset != self.y.offset or len(self.x) != len(self.y):
            raise ValueError("pair components must share an index range")

    @classmethod
    def restrict(cls, x: PathWindow, y: PathWindow) -> "PairWindow":
        lo, hi = max(x.first, y.first), min(x.last, y.last)
        if lo > hi:
            raise WindowTooShort("pair components have no common indices")
        return cls(x.slice(lo, hi), y.slice(lo, hi))

    @property
    def first(self) -> int:
        return self.x.first

    @property
    def last(self) -> int:
        return self.x.last

    def __len__(self):
        return len(self.x)

    def at(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        return self.x[n], self.y[n]


def lambda_map(x: PathWindow, k: int) -> PairWindow:
    """``(T^k x, x + ... + T^{k-1} x)`` on indices ``first .. last - k``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(x) < k + 1:
        raise WindowTooShort(f"lambda_map with k={k} needs a window of length >= {k + 1}")
    v = x.values
    c = np.concatenate([v[:1] * 0, np.cumsum(v, axis=0)])
    block = c[k:] - c[:-k]                      # row j sums x_{first+j} .. x_{first+j+k-1}
    ysum = PathWindow(x.offset, block)
    xs = PathWindow(x.offset - k, v)
    return PairWindow.restrict(xs, ysum)


def s_map(p: PairWindow) -> PairWindow:
    """``(T x, x + y)``; the window loses its last index."""
    if len(p) < 2:
        raise WindowTooShort("s_map needs a pair window of length >= 2")
    tx = PathWindow(p.x.offset - 1, p.x.values)
    xy = PathWindow(p.x.offset, p.x.values + p.y.values)
    return PairWindow.restrict(tx, xy)


def s_power(p: PairWindow, n: int) -> PairWindow:
    for _ in range(n):
        p = s_map(p)
    return p


def shift_pair(p: PairWindow, k: int = 1) -> PairWindow:
    return PairWindow(PathWindow(p.x.offset - k, p.x.values), PathWindow(p.y.offset - k, p.y.values))


def compare(a: PairWindow, b: PairWindow) -> tuple[int, float]:
    """Length of the common index range and the max abs difference on it."""
    lo, hi = max(a.first, b.first), min(a.last, b.last)
    if lo > hi:
        return 0, 0.0
    da = np.concatenate([a.x.slice(lo, hi).values, a.y.slice(lo, hi).values], axis=1)
    db = np.concatenate([b.x.slice(lo, hi).values, b.y.slice(lo, hi).values], axis=1)
    diff = np.abs(np.asarray(da - db, dtype=float))
    return hi - lo + 1, float(diff.max()) if diff.size else 0.0

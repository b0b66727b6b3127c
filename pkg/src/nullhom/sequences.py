"""Finite windows of doubly infinite sequences.

A sequence ``x = (x_n)_{n in Z}`` of vectors in ``R^m`` is only ever
materialized on a finite index range.  :class:`PathWindow` stores that range
as ``offset`` plus a ``(length, m)`` array, so row ``k`` holds ``x_{offset+k}``.

The left shift ``(T x)_n = x_{n+1}`` is a pure relabeling of the stored data,
and the difference map is ``D x = T x - x``.  Partial sums follow the
two-sided convention::

    s_n =  x_1 + ... + x_n          n >= 1
    s_0 =  0
    s_n = -(x_{n+1} + ... + x_0)    n <= -1

so that ``s_n - s_{n-1} = x_n`` for every ``n``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, IndexOutOfWindow, WindowTooShort


def _as_values(values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype.kind not in "iufO":
        arr = arr.astype(float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DimensionMismatch(f"values must be 1-d or 2-d, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise WindowTooShort("a window needs at least one entry of dimension >= 1")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PathWindow:
    offset: int
    values: np.ndarray

    def __init__(self, offset: int, values):
        object.__setattr__(self, "offset", int(offset))
        object.__setattr__(self, "values", _as_values(values))

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def first(self) -> int:
        return self.offset

    @property
    def last(self) -> int:
        return self.offset + len(self) - 1

    def __len__(self) -> int:
        return self.values.shape[0]

    def indices(self) -> np.ndarray:
        return np.arange(self.first, self.last + 1)

    def __getitem__(self, n: int) -> np.ndarray:
        """Value at sequence index ``n`` (not storage position)."""
        if not self.first <= n <= self.last:
            raise IndexOutOfWindow(f"index {n} outside window [{self.first}, {self.last}]")
        return self.values[n - self.offset]

    def slice(self, start: int, stop: int) -> "PathWindow":
        """Sub-window holding indices ``start..stop`` inclusive."""
        if start > stop or start < self.first or stop > self.last:
            raise IndexOutOfWindow(
                f"range [{start}, {stop}] not inside window [{self.first}, {self.last}]"
            )
        return PathWindow(start, self.values[start - self.offset: stop - self.offset + 1])

    def __eq__(self, other):
        if not isinstance(other, PathWindow):
            return NotImplemented
        return (
            self.offset == other.offset
            and self.values.shape == other.values.shape
            and bool(np.all(self.values == other.values))
        )

    def __repr__(self):
        return f"PathWindow(offset={self.offset}, len={len(self)}, dim={self.dim})"


def shift(path: PathWindow, k: int = 1) -> PathWindow:
    """Apply the left shift ``T`` ``k`` times (``k < 0`` applies the inverse)."""
    return PathWindow(path.offset - k, path.values)


def unshift(path: PathWindow) -> PathWindow:
    return shift(path, -1)


def difference(path: PathWindow) -> PathWindow:
    """``D x = T x - x`` on the indices where both terms are stored."""
    if len(path) < 2:
        raise WindowTooShort("difference needs a window of length >= 2")
    v = path.values
    return PathWindow(path.offset, v[1:] - v[:-1])


def partial_sums_range(path: PathWindow) -> tuple[int, int]:
    """Largest index range on which ``s_n`` is computable from the window."""
    lo, hi = path.first, path.last
    start = lo - 1 if lo <= 0 <= hi else 0
    stop = hi if lo <= 1 <= hi else 0
    return start, stop


def partial_sums(path: PathWindow, start: int | None = None, stop: int | None = None) -> PathWindow:
    """Two-sided partial sums ``s_start .. s_stop``.

    ``s_n`` for ``n >= 1`` consumes ``x_1..x_n``; for ``n <= -1`` it consumes
    ``x_{n+1}..x_0``.  Defaults give the largest computable range.
    """
    dstart, dstop = partial_sums_range(path)
    start = dstart if start is None else int(start)
    stop = dstop if stop is None else int(stop)
    if start > stop:
        raise IndexOutOfWindow(f"empty output range [{start}, {stop}]")
    need_lo = min(start + 1, 1)
    need_hi = max(stop, 0)
    if start < 0 and (need_lo < path.first or path.last < 0):
        raise IndexOutOfWindow(f"s_{start} needs x_{start + 1}..x_0, window is [{path.first}, {path.last}]")
    if stop > 0 and (path.first > 1 or need_hi > path.last):
        raise IndexOutOfWindow(f"s_{stop} needs x_1..x_{stop}, window is [{path.first}, {path.last}]")

    v = path.values
    zero = v[:1] * 0
    out = [zero]
    if stop > 0:
        pos = v[1 - path.offset: stop - path.offset + 1]
        out.append(np.cumsum(pos, axis=0))
    if start < 0:
        # s_{-j} = -(x_{-j+1} + ... + x_0), accumulated backwards from x_0
        neg = v[start + 1 - path.offset: 1 - path.offset][::-1]
        out.insert(0, -np.cumsum(neg, axis=0)[::-1])
    full = np.concatenate(out, axis=0)
    full_start = min(start, 0)
    return PathWindow(full_start, full).slice(start, stop)


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _parse(s: str):
    if "/" in s:
        return Fraction(s)
    try:
        return int(s)
    except ValueError:
        return float(s)


def window_to_csv(path: PathWindow) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index"] + [f"c{i}" for i in range(path.dim)])
    for n, row in zip(path.indices(), path.values):
        w.writerow([int(n)] + [_fmt(v) for v in row])
    return buf.getvalue()


def window_from_csv(text: str) -> PathWindow:
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], [r for r in rows[1:] if r]
    if not header or header[0] != "index" or header[1:] != [f"c{i}" for i in range(len(header) - 1)]:
        raise ValueError(f"bad PathWindow CSV header: {header}")
    idx = [int(r[0]) for r in body]
    if idx != list(range(idx[0], idx[0] + len(idx))):
        raise ValueError("PathWindow CSV indices must be consecutive")
    vals = [[_parse(c) for c in r[1:]] for r in body]
    if any(isinstance(c, Fraction) for r in vals for c in r):
        arr = np.array([[Fraction(c) for c in r] for r in vals], dtype=object)
    else:
        arr = np.array(vals)
    return PathWindow(idx[0], arr)


def save_window(path: PathWindow, file) -> None:
    Path(file).write_text(window_to_csv(path))


def load_window(file) -> PathWindow:
    return window_from_csv(Path(file).read_text())

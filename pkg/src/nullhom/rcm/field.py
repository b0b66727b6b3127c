"""Conductance fields on the discrete torus ``(Z / L Z)^dim``.

``weights[x + (i,)]`` is the conductance of the bond between site ``x`` and
``x + e_i`` (indices mod ``L``), so each undirected torus edge is stored once
and the bond to ``x - e_i`` is read from the neighbour.  Sites are numbered in
C order of their coordinates.  Unit directions are ordered
``+e_0, ..., +e_{dim-1}, -e_0, ..., -e_{dim-1}``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable

import numpy as np

from ..errors import InvalidBounds
from ..rng import RandomSource

#: ``sampler(gen, size, a, b)`` returns i.i.d. weights in ``[a, b]``.
WeightSampler = Callable[[np.random.Generator, tuple, float, float], np.ndarray]


def uniform_weights(gen: np.random.Generator, size, a: float, b: float) -> np.ndarray:
    return gen.uniform(a, b, size=size)


def directions(dim: int) -> np.ndarray:
    """``(2 dim, dim)`` integer array of unit steps."""
    eye = np.eye(dim, dtype=np.int64)
    return np.concatenate([eye, -eye])


@dataclass(frozen=True, eq=False)
class ConductanceField:
    dim: int
    L: int
    a: float
    b: float
    weights: np.ndarray
    seed: dict | None = None

    def __post_init__(self):
        _check_bounds(self.dim, self.L, self.a, self.b, allow_equal=True)
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.L,) * self.dim + (self.dim,):
            raise ValueError(f"weights must have shape {(self.L,) * self.dim + (self.dim,)}, got {w.shape}")
        if np.any(w < self.a) or np.any(w > self.b):
            raise InvalidBounds(f"weights must lie in [{self.a}, {self.b}]")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.L,) * self.dim

    @property
    def n_sites(self) -> int:
        return self.L ** self.dim

    def site_index(self, x) -> int:
        return int(np.ravel_multi_index(tuple(np.mod(x, self.L)), self.shape))

    def site_coords(self, idx) -> np.ndarray:
        return np.stack(np.unravel_index(idx, self.shape), axis=-1)

    def bond(self, x, e) -> float:
        """Conductance of the bond ``(x, x + e)`` for a unit vector ``e``."""
        e = np.asarray(e)
        i = int(np.flatnonzero(e)[0])
        y = np.asarray(x) if e[i] > 0 else np.asarray(x) + e
        return float(self.weights[tuple(np.mod(y, self.L)) + (i,)])

    @cached_property
    def bond_table(self) -> np.ndarray:
        """``(n_sites, 2 dim)`` conductances of the bonds at each site, by direction."""
        fwd = self.weights.reshape(self.n_sites, self.dim)
        back = np.stack(
            [np.roll(self.weights[..., i], 1, axis=i).reshape(-1) for i in range(self.dim)], axis=1
        )
        return np.concatenate([fwd, back], axis=1)

    @cached_property
    def neighbor_table(self) -> np.ndarray:
        """``(n_sites, 2 dim)`` site index of ``x + e`` on the torus."""
        coords = self.site_coords(np.arange(self.n_sites))
        out = np.empty((self.n_sites, 2 * self.dim), dtype=np.int64)
        for k, e in enumerate(directions(self.dim)):
            nb = np.mod(coords + e, self.L)
            out[:, k] = np.ravel_multi_index(tuple(nb.T), self.shape)
        return out

    @cached_property
    def prob_table(self) -> np.ndarray:
        """``(n_sites, 2 dim)`` jump probabilities, rows summing to one."""
        w = self.bond_table
        return w / w.sum(axis=1, keepdims=True)

    def translated(self, y) -> "ConductanceField":
        """The field seen from ``y``: ``(tau_y omega)(x, x+e) = omega(x+y, x+y+e)``."""
        shift = tuple(-int(c) for c in np.mod(y, self.L))
        w = np.roll(self.weights, shift, axis=tuple(range(self.dim)))
        return ConductanceField(self.dim, self.L, self.a, self.b, w, self.seed)

    def same_as(self, other: "ConductanceField") -> bool:
        return (
            other is self
            or (other.dim == self.dim and other.L == self.L and np.array_equal(other.weights, self.weights))
        )


def _check_bounds(dim, L, a, b, allow_equal=False):
    if int(dim) < 1:
        raise InvalidBounds(f"dim must be >= 1, got {dim}")
    if int(L) < 2:
        raise InvalidBounds(f"L must be >= 2, got {L}")
    ok = 0 < a <= b if allow_equal else 0 < a < b
    if not ok:
        raise InvalidBounds(f"need 0 < a < b, got a={a}, b={b}")


def sample_field(dim: int, L: int, a: float, b: float, src: RandomSource,
                 sampler: WeightSampler = uniform_weights) -> ConductanceField:
    """Draw i.i.d. bond conductances (uniform on ``[a, b]`` by default)."""
    _check_bounds(dim, L, a, b)
    w = sampler(src.generator(), (L,) * dim + (dim,), a, b)
    return ConductanceField(dim, L, float(a), float(b), w, src.record())


def constant_field(dim: int, L: int, c: float = 1.0) -> ConductanceField:
    return ConductanceField(dim, L, float(c), float(c), np.full((L,) * dim + (dim,), float(c)))


def transition_probs(field: ConductanceField, x) -> np.ndarray:
    """Jump probabilities from site ``x`` in each unit direction.

    ``pi(x, x+e) = omega(x, x+e) / sum_e' omega(x, x+e')``.
    """
    w = np.array([field.bond(x, e) for e in directions(field.dim)])
    return w / w.sum()


# ---------------------------------------------------------------------------
# Files: JSON header plus inline weights or a raw little-endian float64 sidecar


def field_to_dict(field: ConductanceField) -> dict:
    return {
        "dim": field.dim,
        "L": field.L,
        "a": field.a,
        "b": field.b,
        "seed": field.seed,
        "order": "site-major C order, then axis",
        "weights": field.weights.reshape(-1).tolist(),
    }


def save_field(path, field: ConductanceField, binary: bool = False) -> None:
    path = Path(path)
    data = field_to_dict(field)
    if binary:
        side = path.with_suffix(".f8")
        side.write_bytes(field.weights.astype("<f8").tobytes())
        data["weights"] = None
        data["weights_file"] = side.name
    path.write_text(json.dumps(data) + "\n")


def load_field(path) -> ConductanceField:
    path = Path(path)
    data = json.loads(path.read_text())
    dim, L = int(data["dim"]), int(data["L"])
    if data.get("weights") is not None:
        w = np.asarray(data["weights"], dtype=float)
    else:
        w = np.frombuffer((path.parent / data["weights_file"]).read_bytes(), dtype="<f8")
    return ConductanceField(dim, L, float(data["a"]), float(data["b"]),
                            w.reshape((L,) * dim + (dim,)), data.get("seed"))

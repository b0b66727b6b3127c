"""Quenched random walks in a periodic conductance field.

Walks live on ``Z^dim`` (positions are lifted, never wrapped); the field is
read at ``S_k mod L``.  :func:`run_walks` advances a batch of independent
walks step by step and hands each position to an observer, so long Monte
Carlo runs never store whole paths.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from ..rng import RandomSource, map_blocks
from .environment import CorrectorField, local_drift
from .field import ConductanceField, directions, transition_probs

#: Walks per random stream; large blocks keep the per-step overhead low.
WALK_BLOCK = 8192


@dataclass(frozen=True, eq=False)
class QuenchedWalk:
    sites: np.ndarray           # (n + 1, dim) lifted positions
    field: ConductanceField
    seed: dict = dc_field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.sites.shape[0] - 1

    def site_indices(self) -> np.ndarray:
        return np.ravel_multi_index(tuple(np.mod(self.sites, self.field.L).T), self.field.shape)

    def nearest_neighbor(self) -> bool:
        return bool(np.all(np.abs(np.diff(self.sites, axis=0)).sum(axis=1) == 1))


class StepObserver:
    """Receives every position ``S_0, ..., S_n`` of a block of walks.

    ``visit(k, pos, idx)`` gets lifted positions ``(reps, dim)`` and torus
    site indices ``(reps,)`` of ``S_k``.
    """

    def start(self, reps: int, dim: int) -> None:
        pass

    def visit(self, k: int, pos: np.ndarray, idx: np.ndarray) -> None:
        pass

    def result(self):
        return None


class PathRecorder(StepObserver):
    def __init__(self, n: int):
        self.n = n

    def start(self, reps, dim):
        self.paths = np.empty((reps, self.n + 1, dim), dtype=np.int64)

    def visit(self, k, pos, idx):
        self.paths[:, k] = pos

    def result(self):
        return self.paths


def _walk_block(field: ConductanceField, n: int, start: np.ndarray, gen: np.random.Generator,
                size: int, observer: StepObserver):
    cum = np.cumsum(field.prob_table, axis=1)
    cum[:, -1] = np.inf
    steps = directions(field.dim)
    nb = field.neighbor_table
    pos = np.tile(start, (size, 1))
    idx = np.full(size, field.site_index(start), dtype=np.int64)
    observer.start(size, field.dim)
    for k in range(n):
        observer.visit(k, pos, idx)
        u = gen.random(size)
        choice = (cum[idx] <= u[:, None]).sum(axis=1)
        pos = pos + steps[choice]
        idx = nb[idx, choice]
    observer.visit(n, pos, idx)
    return observer.result()


def _start(field, start):
    if start is None:
        return np.zeros(field.dim, dtype=np.int64)
    s = np.asarray(start, dtype=np.int64).reshape(-1)
    if s.shape != (field.dim,):
        raise ValueError(f"start must have {field.dim} coordinates")
    return s


def run_walks(field: ConductanceField, n: int, reps: int, src: RandomSource,
              make_observer: Callable[[], StepObserver], start=None,
              threads: int | None = None) -> list:
    """Simulate ``reps`` walks of ``n`` steps; returns observer results in block order."""
    s0 = _start(field, start)
    return map_blocks(
        lambda gen, size: _walk_block(field, int(n), s0, gen, size, make_observer()),
        reps, src, threads, block=WALK_BLOCK,
    )


def simulate_quenched_walk(field: ConductanceField, n: int, src: RandomSource, start=None) -> QuenchedWalk:
    """One walk ``S_0, ..., S_n`` with ``S_0 = start`` (origin by default)."""
    s0 = _start(field, start)
    paths = _walk_block(field, int(n), s0, src.generator(), 1, PathRecorder(int(n)))
    return QuenchedWalk(paths[0], field, src.record())


def simulate_paths(field: ConductanceField, n: int, reps: int, src: RandomSource, start=None,
                   threads: int | None = None) -> np.ndarray:
    """``(reps, n + 1, dim)`` lifted paths."""
    parts = run_walks(field, n, reps, src, lambda: PathRecorder(int(n)), start, threads)
    return np.concatenate(parts, axis=0)


def martingale_decomposition(walk: QuenchedWalk, field: ConductanceField | None = None) -> np.ndarray:
    """``Z_k = S_k - S_0 - sum_{j<k} d(S_j)`` for ``k = 0..n``."""
    field = walk.field if field is None else field
    d = local_drift(field)
    idx = np.ravel_multi_index(tuple(np.mod(walk.sites, field.L).T), field.shape)
    drift_sum = np.concatenate([np.zeros((1, field.dim)), np.cumsum(d[idx[:-1]], axis=0)])
    return (walk.sites - walk.sites[0]) - drift_sum


def corrected_martingale_means(field: ConductanceField, corrector: CorrectorField, sites) -> np.ndarray:
    """Exact ``E[M_{k+1} - M_k | S_k = x]`` for ``M = S + V(S)``.

    Probabilities come from :func:`transition_probs` site by site and ``V`` is
    read at lifted neighbours through its periodic extension.
    """
    corrector.require_field(field)
    vgrid = corrector.v_grid()
    out = []
    for x in np.asarray(sites).reshape(-1, field.dim):
        p = transition_probs(field, x)
        vx = vgrid[tuple(np.mod(x, field.L))]
        inc = [e + vgrid[tuple(np.mod(x + e, field.L))] - vx for e in directions(field.dim)]
        out.append(p @ np.asarray(inc))
    return np.asarray(out)


def corrected_martingale_check(walk: QuenchedWalk, corrector: CorrectorField, mode: str = "exact") -> dict:
    """Conditional mean increments of ``S_k + V(S_k)`` along a walk.

    ``mode="exact"`` evaluates the conditional mean at every distinct visited
    site from the transition probabilities.  ``mode="sampled"`` buckets the
    walk's own increments by site and reports the largest ``|mean| / SE``.
    """
    field = walk.field
    corrector.require_field(field)
    idx = walk.site_indices()
    if mode == "exact":
        visited = np.unique(idx[:-1])
        means = corrected_martingale_means(field, corrector, field.site_coords(visited))
        return {
            "mode": "exact",
            "sites": int(len(visited)),
            "max_abs_mean": float(np.max(np.abs(means))) if len(visited) else 0.0,
        }
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    m = walk.sites + corrector.v[idx]
    inc = np.diff(m, axis=0)
    worst_z, worst_mean = 0.0, 0.0
    for x in np.unique(idx[:-1]):
        sel = inc[idx[:-1] == x]
        if len(sel) < 2:
            continue
        mean = sel.mean(axis=0)
        se = sel.std(axis=0, ddof=1) / np.sqrt(len(sel))
        z = np.abs(mean) / np.where(se > 0, se, np.inf)
        worst_z = max(worst_z, float(np.max(z)))
        worst_mean = max(worst_mean, float(np.max(np.abs(mean))))
    return {"mode": "sampled", "max_abs_mean": worst_mean, "max_z": worst_z}

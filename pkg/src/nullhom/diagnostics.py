"""Empirical diagnostics for tightness and boundedness of partial sums.

A stationary sequence is null-homologous exactly when the laws of its partial
sums ``S_n`` form a tight family.  Tightness has no finite-sample test, so
:func:`tightness_diagnostic` is an explicitly heuristic three-way verdict
built from quantile growth:

* ``tight-consistent``: fitted log-log slope of the quantiles <= 0.05 and the
  top-level quantile at the largest horizon is at most 1.2 times its value at
  the median horizon;
* ``growing``: slope >= 0.2;
* ``inconclusive`` otherwise.

Only forward sums are simulated.  Under stationarity the backward family
``S_{-n}`` has the same laws as ``-S_n`` for the time-reversed chain, so the
two-sided statement reduces to the forward one for the instances here.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import InsufficientReps, WindowTooShort
from .maps import PairWindow, compare, lambda_map, s_map, s_power, shift_pair
from .mrw import (
    CounterexampleCycle,
    IncrementFunction,
    MarkovChainSpec,
    ShiftFunction,
    accumulate,
    decide_null_homology,
    make_null_homologous,
    mean_increment,
    simulate_states,
    spanning_tree,
    validate_chain,
)
from .rng import RandomSource, map_blocks
from .sequences import PathWindow

TIGHT_EXPONENT = 0.05
GROWING_EXPONENT = 0.2
TIGHT_RATIO = 1.2
MIN_REPS = 100


@dataclass(frozen=True)
class SamplerHandle:
    """Source of i.i.d. replicas of ``S_0, ..., S_N``.

    ``draw(gen, reps, n)`` returns an array ``(reps, n + 1, dim)``.
    """

    name: str
    dim: int
    draw: Callable[[np.random.Generator, int, int], np.ndarray]
    metadata: dict = field(default_factory=dict)

    def sample(self, src: RandomSource, reps: int, n: int, threads: int | None = None) -> np.ndarray:
        parts = map_blocks(lambda gen, size: self.draw(gen, size, n), reps, src, threads)
        return np.concatenate(parts, axis=0)


def mrw_sampler(chain: MarkovChainSpec, f: IncrementFunction, start="stationary",
                name: str = "mrw") -> SamplerHandle:
    def draw(gen, reps, n):
        states = simulate_states(chain, n, reps, gen, start)
        sums, den = accumulate(chain, f, states)
        return sums.astype(float) / den if den is not None else sums

    return SamplerHandle(name, f.dim, draw, {"n_states": chain.n_states, "start": str(start)})


def iid_sampler(values, probs=None, name: str = "iid") -> SamplerHandle:
    """Random walk with i.i.d. scalar increments drawn from ``values``."""
    vals = np.asarray(values, dtype=float)
    p = None if probs is None else np.asarray(probs, dtype=float)

    def draw(gen, reps, n):
        steps = gen.choice(vals, size=(reps, n), p=p)
        out = np.zeros((reps, n + 1, 1))
        out[:, 1:, 0] = np.cumsum(steps, axis=1)
        return out

    mean = float(vals.mean() if p is None else vals @ p)
    return SamplerHandle(name, 1, draw, {"values": vals.tolist(), "mean": mean})


def constant_sampler(c: float, name: str = "constant") -> SamplerHandle:
    def draw(gen, reps, n):
        out = np.zeros((reps, n + 1, 1))
        out[:, :, 0] = c * np.arange(n + 1)
        return out

    return SamplerHandle(name, 1, draw, {"increment": c})


# ---------------------------------------------------------------------------
# Tightness


@dataclass(frozen=True)
class TightnessReport:
    horizons: tuple[int, ...]
    quantile_levels: tuple[float, ...]
    quantile_values: np.ndarray          # (horizon, level)
    growth_exponent: float
    verdict: str
    sampler: str = ""
    reps: int = 0
    slopes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "sampler": self.sampler,
            "reps": self.reps,
            "horizons": list(self.horizons),
            "quantile_levels": list(self.quantile_levels),
            "quantile_values": self.quantile_values.tolist(),
            "growth_exponent": self.growth_exponent,
            "slopes_by_level": {str(k): v for k, v in self.slopes.items()},
            "verdict": self.verdict,
            "thresholds": {"tight_exponent": TIGHT_EXPONENT, "growing_exponent": GROWING_EXPONENT,
                           "tight_ratio": TIGHT_RATIO},
            "note": "forward sums only; backward family reduces to it by stationarity",
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("horizon,level,quantile\n")
        for h, row in zip(self.horizons, self.quantile_values):
            for lev, q in zip(self.quantile_levels, row):
                buf.write(f"{h},{lev!r},{float(q)!r}\n")
        return buf.getvalue()


def _norms(paths: np.ndarray, horizons) -> np.ndarray:
    return np.linalg.norm(paths[:, list(horizons), :], axis=2)


def growth_exponent(horizons, qvals: np.ndarray) -> tuple[float, dict]:
    """Mean least-squares slope of ``log q`` against ``log n`` over levels.

    Levels with a zero quantile at some horizon are skipped; if every quantile
    is zero the exponent is 0, and if only mixed levels remain it is ``nan``.
    """
    logh = np.log(np.asarray(horizons, dtype=float))
    slopes = {}
    for j in range(qvals.shape[1]):
        col = qvals[:, j]
        if np.all(col > 0):
            slopes[j] = float(np.polyfit(logh, np.log(col), 1)[0])
    if slopes:
        return float(np.mean(list(slopes.values()))), slopes
    if np.all(qvals == 0):
        return 0.0, slopes
    return float("nan"), slopes


def classify(horizons, qvals: np.ndarray, exponent: float) -> str:
    top = qvals[:, -1]
    mid = top[len(horizons) // 2]
    ratio_ok = top[-1] <= TIGHT_RATIO * mid if mid > 0 else top[-1] == 0
    if exponent <= TIGHT_EXPONENT and ratio_ok:
        return "tight-consistent"
    if exponent >= GROWING_EXPONENT:
        return "growing"
    return "inconclusive"


def tightness_diagnostic(sampler: SamplerHandle, horizons, reps: int, levels=(0.9, 0.99),
                         src: RandomSource | None = None, threads: int | None = None) -> TightnessReport:
    """Quantiles of ``|S_n|`` across horizons and a growth verdict.

    Raises
    ------
    InsufficientReps
        If ``reps`` is below 100.
    """
    horizons = tuple(int(h) for h in horizons)
    if reps < MIN_REPS:
        raise InsufficientReps(f"need at least {MIN_REPS} replicas, got {reps}")
    if len(horizons) < 2 or any(b <= a for a, b in zip(horizons, horizons[1:])) or horizons[0] < 1:
        raise ValueError("horizons must be positive and strictly increasing")
    levels = tuple(sorted(float(x) for x in levels))
    src = src or RandomSource(0)
    paths = sampler.sample(src, reps, horizons[-1], threads)
    norms = _norms(paths, horizons)
    qvals = np.quantile(norms, levels, axis=0).T
    expo, slopes = growth_exponent(horizons, qvals)
    verdict = "inconclusive" if math.isnan(expo) else classify(horizons, qvals, expo)
    return TightnessReport(horizons, levels, qvals, expo, verdict, sampler.name, int(reps),
                           {levels[j]: s for j, s in slopes.items()})


def lp_bound_check(sampler: SamplerHandle, p: float, horizons, reps: int,
                   src: RandomSource | None = None, threads: int | None = None) -> dict:
    """Empirical ``E|S_n|^p`` per horizon with a boundedness verdict.

    ``bounded`` when, over the top half of the horizons, every moment is within
    20% of the running median of the moments seen so far in that half.
    """
    if not p > 0:
        raise ValueError("p must be positive")
    horizons = tuple(int(h) for h in horizons)
    src = src or RandomSource(0)
    paths = sampler.sample(src, reps, horizons[-1], threads)
    moments = (_norms(paths, horizons) ** p).mean(axis=0)
    top = moments[len(horizons) // 2:]
    ok = True
    for i in range(len(top)):
        med = float(np.median(top[: i + 1]))
        if abs(top[i] - med) > 0.2 * med or (med == 0 and top[i] != 0):
            ok = False
    return {
        "sampler": sampler.name,
        "p": float(p),
        "reps": int(reps),
        "horizons": list(horizons),
        "moments": [float(m) for m in moments],
        "verdict": "bounded" if ok else "unbounded",
    }


# ---------------------------------------------------------------------------
# Exact decision against the tightness verdict on finite Markov random walks


@dataclass(frozen=True)
class EquivalenceConfig:
    horizons: tuple[int, ...] = (16, 32, 64, 128, 256, 512, 1024, 2048)
    reps: int = 1000
    levels: tuple[float, ...] = (0.9, 0.99)
    seed: int = 0
    stream: int = 0
    tol: float = 1e-9
    mean_tol: float = 1e-12


def theorem_equivalence_experiment(chain: MarkovChainSpec, f: IncrementFunction,
                                   config: EquivalenceConfig = EquivalenceConfig(),
                                   threads: int | None = None) -> dict:
    """Exact null-homology decision next to the tightness verdict on the same walk.

    Hard assertions: a coboundary must look ``tight-consistent``; a
    non-coboundary with nonzero stationary mean increment must look
    ``growing``.  Zero-mean non-coboundaries are reported only.
    """
    decision = decide_null_homology(chain, f, config.tol)
    null = isinstance(decision, ShiftFunction)
    rep = tightness_diagnostic(mrw_sampler(chain, f), config.horizons, config.reps, config.levels,
                               RandomSource(config.seed, config.stream), threads)
    mu_mean = mean_increment(chain, f)
    drifting = bool(np.max(np.abs(mu_mean)) > config.mean_tol)
    if null:
        hard, expected = True, "tight-consistent"
    elif drifting:
        hard, expected = True, "growing"
    else:
        hard, expected = False, "growing"
    agrees = rep.verdict == expected
    out = {
        "exact_decision": "YES" if null else "NO",
        "verdict": rep.verdict,
        "growth_exponent": rep.growth_exponent,
        "mu_mean_increment": [float(x) for x in mu_mean],
        "expected_verdict": expected,
        "hard_assertion": hard,
        "agrees": agrees,
        "false_fire": bool(hard and not agrees),
        "tightness": rep.to_dict(),
    }
    if isinstance(decision, CounterexampleCycle):
        out["cycle_sum"] = [float(x) for x in decision.cycle_sum]
    return out


def random_irreducible_chain(gen: np.random.Generator, n: int, density: float = 0.5) -> MarkovChainSpec:
    """Random irreducible chain: a random Hamiltonian cycle plus extra edges
    with integer weights 1..4, rows normalized."""
    perm = gen.permutation(n)
    mask = gen.random((n, n)) < density
    mask[perm, np.roll(perm, -1)] = True
    w = np.where(mask, gen.integers(1, 5, size=(n, n)), 0).astype(float)
    P = w / w.sum(axis=1, keepdims=True)
    return validate_chain(P)


def bundled_suite(seed: int = 2024, n_each: int = 10, delta=Fraction(1, 2)) -> list[tuple[str, MarkovChainSpec, IncrementFunction]]:
    """Coboundary instances and single-edge perturbations of them.

    Potentials are rational in ``[-1, 1]`` with denominator 4; each perturbation
    adds ``delta`` to the first non-tree edge, which makes the stationary mean
    increment ``mu(s) P(s, t) delta`` nonzero.
    """
    gen = RandomSource(seed, 0).generator()
    out = []
    for i in range(n_each):
        n = int(gen.integers(2, 7))
        chain = random_irreducible_chain(gen, n)
        xi = [Fraction(int(k), 4) for k in gen.integers(-4, 5, size=n)]
        f = make_null_homologous(chain, np.array(xi, dtype=object))
        out.append((f"coboundary-{i}", chain, f))
        tree = set(spanning_tree(chain).tree_edges)
        edge = next(e for e in chain.edges() if e not in tree)
        out.append((f"perturbed-{i}", chain, f.perturbed(edge, delta)))
    return out


# ---------------------------------------------------------------------------
# Proof-map identities on sample windows


def _ycomp_direct(x: PathWindow, y: PathWindow, i0: int, n: int):
    total = y[i0]
    for j in range(n):
        total = total + x[i0 + j]
    return total


def schauder_map_checks(path: PathWindow, k_max: int, y: PathWindow | None = None) -> dict:
    """Check the commuting-map identities on one window.

    * ``s_map(lambda_map(x, n)) == lambda_map(x, n + 1)`` for ``1 <= n < k_max``;
    * ``s_map(shift_pair(p)) == shift_pair(s_map(p))`` on ``p = (x, y)``;
    * ``Y'_{n+1} = Y'_n + X'_n`` where ``(X'_n, Y'_n)`` is ``S^n(x, y)`` read at
      the window's first index, also compared with ``y_0 + x_0 + ... + x_{n-1}``
      summed directly;
    * ``S^0`` is the identity.

    ``y`` defaults to the zero sequence.  Differences are exact for integer
    windows.
    """
    if len(path) < k_max + 2:
        raise WindowTooShort(f"window of length {len(path)} too short for k_max={k_max}")
    y = PathWindow(path.offset, path.values * 0) if y is None else y
    pair = PairWindow.restrict(path, y)
    worst = 0.0
    lam = []
    for n in range(1, k_max):
        overlap, diff = compare(s_map(lambda_map(path, n)), lambda_map(path, n + 1))
        lam.append({"n": n, "overlap": overlap, "max_diff": diff})
        worst = max(worst, diff)
    overlap, comm = compare(s_map(shift_pair(pair)), shift_pair(s_map(pair)))
    i0 = pair.first
    rec, direct = 0.0, 0.0
    for n in range(k_max):
        xn, yn = s_power(pair, n).at(i0)
        _, yn1 = s_power(pair, n + 1).at(i0)
        rec = max(rec, float(np.max(np.abs(np.asarray(yn1 - (yn + xn), dtype=float)))))
        d = _ycomp_direct(pair.x, pair.y, i0, n) - yn
        direct = max(direct, float(np.max(np.abs(np.asarray(d, dtype=float)))))
    _, ident = compare(s_power(pair, 0), pair)
    ok = worst == 0 and comm == 0 and rec == 0 and direct == 0 and ident == 0 and all(r["overlap"] > 0 for r in lam)
    return {
        "k_max": int(k_max),
        "lambda_identity": lam,
        "lambda_max_diff": worst,
        "commutation_overlap": overlap,
        "commutation_max_diff": comm,
        "y_recursion_max_diff": rec,
        "y_direct_max_diff": direct,
        "identity_max_diff": ident,
        "all_exact": bool(ok),
    }

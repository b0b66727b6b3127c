"""Monte Carlo experiments for the quenched walk: LLN, Azuma, CLT, corrector scan."""
from __future__ import annotations

import math

import numpy as np
from scipy import stats

from ..rng import RandomSource
from .environment import CorrectorField, build_environment, limit_gradient, local_drift
from .field import ConductanceField, WeightSampler, directions, sample_field, uniform_weights
from .walks import StepObserver, run_walks


class _DriftSums(StepObserver):
    """Final position, ``sum_{j<n} d(S_j)`` and the largest martingale step."""

    def __init__(self, drift: np.ndarray, n: int):
        self.drift, self.n = drift, n

    def start(self, reps, dim):
        self.acc = np.zeros((reps, dim))
        self.max_step = 0.0
        self.prev = None

    def visit(self, k, pos, idx):
        if self.prev is not None:
            prev_pos, prev_d = self.prev
            dz = (pos - prev_pos) - prev_d
            self.max_step = max(self.max_step, float(np.max(np.abs(dz))))
        if k < self.n:
            d = self.drift[idx]
            self.acc += d
            self.prev = (pos, d)
        else:
            self.final = pos.astype(float)

    def result(self):
        return self.final, self.acc, self.max_step


def _drift_runs(field, n, reps, src, start, threads):
    d = local_drift(field)
    parts = run_walks(field, n, reps, src, lambda: _DriftSums(d, n), start, threads)
    final = np.concatenate([p[0] for p in parts])
    dsum = np.concatenate([p[1] for p in parts])
    return final, dsum, max(p[2] for p in parts)


def lln_check(field: ConductanceField, n: int, reps: int, src: RandomSource, threshold: float = 0.05,
              C: float = 1.0, start=None, threads: int | None = None) -> dict:
    """Law of large numbers for ``S_n / n`` and the Birkhoff drift average.

    The soft contract ``C log(n) / sqrt(n)`` is reported, never enforced.
    """
    s0 = np.zeros(field.dim) if start is None else np.asarray(start, dtype=float)
    final, dsum, _ = _drift_runs(field, n, reps, src, start, threads)
    speed = np.linalg.norm(final - s0, axis=1) / n
    davg = np.linalg.norm(dsum, axis=1) / n
    soft = C * math.log(n) / math.sqrt(n)
    return {
        "n": int(n),
        "reps": int(reps),
        "max_abs_S_over_n": float(speed.max()),
        "q99_abs_S_over_n": float(np.quantile(speed, 0.99)),
        "threshold": threshold,
        "fraction_within_threshold": float(np.mean(speed <= threshold)),
        "max_abs_drift_average": float(davg.max()),
        "soft_bound": soft,
        "soft_bound_holds": bool(speed.max() <= soft and davg.max() <= soft),
    }


def azuma_bound(n: int, eps: float, increment_bound: float = 2.0) -> float:
    """``exp(-n^{2 eps} / (2 c^2))``: Azuma-Hoeffding for ``Z_n >= n^{1/2 + eps}``."""
    return math.exp(-(n ** (2 * eps)) / (2 * increment_bound ** 2))


def azuma_check(field: ConductanceField, n: int, eps: float, reps: int, src: RandomSource,
                increment_bound: float = 2.0, start=None, threads: int | None = None) -> dict:
    """Exceedance frequency of ``Z_n >= n^{1/2 + eps}`` per coordinate against Azuma."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    s0 = np.zeros(field.dim) if start is None else np.asarray(start, dtype=float)
    final, dsum, max_step = _drift_runs(field, n, reps, src, start, threads)
    z = final - s0 - dsum
    level = n ** (0.5 + eps)
    freq = (z >= level).mean(axis=0)
    bound = azuma_bound(n, eps, increment_bound)
    se = math.sqrt(bound * (1 - bound) / reps)
    return {
        "n": int(n),
        "eps": float(eps),
        "reps": int(reps),
        "level": level,
        "exceedance": [float(x) for x in freq],
        "exceedance_count": [int(x) for x in (z >= level).sum(axis=0)],
        "bound": bound,
        "increment_bound": increment_bound,
        "max_observed_increment": max_step,
        "passed": bool(np.all(freq <= bound + 3 * se)) and max_step <= increment_bound + 1e-12,
    }


class _CorrectedIncrements(StepObserver):
    def __init__(self, v: np.ndarray, n: int):
        self.v, self.n = v, n

    def start(self, reps, dim):
        self.qv = np.zeros((dim, dim))
        self.prev = None

    def visit(self, k, pos, idx):
        m = pos + self.v[idx]
        if self.prev is not None:
            dm = m - self.prev
            self.qv += dm.T @ dm
        self.prev = m
        if k == self.n:
            self.final = pos.astype(float)

    def result(self):
        return self.final, self.qv


def exact_diffusivity(corrector: CorrectorField) -> np.ndarray:
    """``sum_x q(x) sum_e pi(x, x+e) (e + G(x,e)) (e + G(x,e))^T``."""
    field = corrector.field
    env = build_environment(field, check=False)
    w = directions(field.dim)[None] + corrector.grad
    return np.einsum("x,xe,xei,xej->ij", env.q, field.prob_table, w, w)


def clt_experiment(field: ConductanceField, n: int, reps: int, src: RandomSource,
                   corrector: CorrectorField | None = None, threads: int | None = None) -> dict:
    """Gaussian approximation of ``S_n / sqrt(n)`` under the quenched law.

    The variance is fitted from the quadratic variation of the corrected
    martingale ``S_k + V(S_k)`` accumulated over all walks and steps.  KS
    distances are per coordinate against ``N(0, Sigma_ii)``; ``ks_smoothed``
    first spreads each sample uniformly over its lattice cell (``S_n`` lives
    on a lattice; in dim 1 on a parity sublattice of spacing 2), which removes the discreteness term
    of order ``n^{-1/2}`` that the raw statistic carries.
    """
    corrector = limit_gradient(build_environment(field)) if corrector is None else corrector
    corrector.require_field(field)
    parts = run_walks(field, n, reps, src, lambda: _CorrectedIncrements(corrector.v, n), None, threads)
    final = np.concatenate([p[0] for p in parts])
    sigma = sum(p[1] for p in parts) / (reps * n)
    sigma_exact = exact_diffusivity(corrector)
    x = final / math.sqrt(n)
    # each coordinate's marginal lattice spacing: 2 in dim 1 (parity), 1 otherwise
    half = 1.0 if field.dim == 1 else 0.5
    jitter = src.child(1 << 32).generator().uniform(-half, half, size=final.shape)
    smooth = (final + jitter) / math.sqrt(n)
    ks, ks_s = [], []
    for i in range(field.dim):
        sd = math.sqrt(sigma[i, i])
        ks.append(float(stats.kstest(x[:, i], "norm", args=(0.0, sd)).statistic))
        ks_s.append(float(stats.kstest(smooth[:, i], "norm", args=(0.0, sd)).statistic))
    return {
        "n": int(n),
        "reps": int(reps),
        "sigma_hat": sigma.tolist(),
        "sigma_exact": sigma_exact.tolist(),
        "sample_variance": np.atleast_2d(np.cov(x, rowvar=False)).tolist(),
        "ks": ks,
        "ks_smoothed": ks_s,
        "max_abs_corrector": float(np.max(np.abs(corrector.v))),
    }


def corrector_scan(dim: int, a: float, b: float, L_list, reps: int, src: RandomSource,
                   sampler: WeightSampler = uniform_weights) -> dict:
    """``max |V|`` and ``max |V| / L`` over sampled fields for each side length.

    On a torus the corrector is periodic, so this only probes how its size
    scales with ``L``.
    """
    rows, summary = [], []
    for i, L in enumerate(L_list):
        vals = []
        for r in range(reps):
            rs = src.child(i).child(r)
            field = _sample(dim, L, a, b, rs, sampler)
            corr = limit_gradient(build_environment(field))
            m = float(np.max(np.abs(corr.v)))
            vals.append(m)
            rows.append({"L": int(L), "rep": r, "max_abs_V": m, "max_abs_V_over_L": m / L})
        v = np.asarray(vals)
        summary.append({
            "L": int(L),
            "median_max_abs_V": float(np.median(v)),
            "q75_max_abs_V": float(np.quantile(v, 0.75)),
            "median_max_abs_V_over_L": float(np.median(v / L)),
            "q75_max_abs_V_over_L": float(np.quantile(v / L, 0.75)),
        })
    return {"dim": dim, "a": a, "b": b, "reps": reps, "rows": rows, "summary": summary}


def _sample(dim, L, a, b, src, sampler):
    if a == b:
        from .field import constant_field
        return constant_field(dim, L, a)
    return sample_field(dim, L, a, b, src, sampler)


def scan_csv(report: dict) -> str:
    lines = ["L,rep,max_abs_V,max_abs_V_over_L"]
    for r in report["rows"]:
        lines.append(f"{r['L']},{r['rep']},{r['max_abs_V']!r},{r['max_abs_V_over_L']!r}")
    return "\n".join(lines) + "\n"

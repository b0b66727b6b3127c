"""Residuals of the identities a torus corrector must satisfy.

Every function returns a max-norm residual (a float) or a small dict of them;
tolerances live in :data:`HARD_TOLERANCES` and are applied by
:func:`verify_field`.
"""
from __future__ import annotations

import numpy as np

from .environment import (
    CorrectorField,
    build_environment,
    limit_gradient,
    local_drift,
    neumann_series,
    solve_poisson,
    staircase,
)
from .field import ConductanceField, directions
from .walks import corrected_martingale_means

HARD_TOLERANCES = {
    "row_sum": 1e-12,
    "q_invariance": 1e-12,
    "self_adjoint": 1e-12,
    "drift_q_mean": 1e-12,
    "poisson": 1e-10,
    "neumann_vs_direct": 1e-7,
    "plaquette": 1e-8,
    "harmonic": 1e-8,
    "stationary_gradient": 1e-10,
    "torus_winding": 1e-12,
    "corrected_martingale": 1e-8,
}


def drift_q_mean(env, drift=None) -> float:
    d = local_drift(env.field) if drift is None else drift
    return float(np.max(np.abs(env.q @ d)))


def poisson_residual(env, g, drift, epsilon: float) -> float:
    g2 = g.reshape(env.n_env, -1)
    r = (1 + epsilon) * g2 - env.pi_hat @ g2 - drift.reshape(env.n_env, -1)
    return float(np.max(np.abs(r)))


def plaquette_residual(corrector: CorrectorField) -> float:
    """Max defect of ``G`` around unit squares ``x -> x+e_i -> x+e_i+e_j -> x+e_j -> x``."""
    f = corrector.field
    G, nb = corrector.grad, f.neighbor_table
    worst = 0.0
    for i in range(f.dim):
        for j in range(i + 1, f.dim):
            loop = G[:, i] + G[nb[:, i], j] - G[nb[:, j], i] - G[:, j]
            worst = max(worst, float(np.max(np.abs(loop))))
    return worst


def torus_winding_residual(corrector: CorrectorField) -> float:
    """Sum of ``G`` along each straight loop winding once around the torus."""
    f = corrector.field
    gpos = corrector.grad[:, : f.dim].reshape(f.shape + (f.dim, -1))
    worst = 0.0
    for i in range(f.dim):
        worst = max(worst, float(np.max(np.abs(gpos[..., i, :].sum(axis=i)))))
    return worst


def periodicity_residual(corrector: CorrectorField) -> float:
    """Staircase corrector on the doubled box against the periodic table."""
    f = corrector.field
    big = staircase(f, corrector.grad, extent=2 * f.L)
    tiled = np.tile(corrector.v_grid(), (2,) * f.dim + (1,))
    return float(np.max(np.abs(big - tiled)))


def harmonic_means(field: ConductanceField, corrector: CorrectorField, sites=None) -> np.ndarray:
    """``sum_e pi(x, x+e) [(x + e + V(x+e)) - (x + V(x))]`` per site.

    ``V(x + e)`` uses the periodic extension across the torus boundary.
    """
    corrector.require_field(field)
    P = field.prob_table
    nb = field.neighbor_table
    v = corrector.v
    sites = np.arange(field.n_sites) if sites is None else np.asarray(sites)
    steps = directions(field.dim)[None, :, :] + v[nb[sites]] - v[sites][:, None, :]
    return np.einsum("se,sed->sd", P[sites], steps)


def check_harmonic(field: ConductanceField, corrector: CorrectorField) -> float:
    """Max over sites of the one-step mean of ``x + V(x)``; zero when harmonic."""
    return float(np.max(np.abs(harmonic_means(field, corrector))))


def check_stationary_gradient(field: ConductanceField, corrector: CorrectorField) -> float:
    """Max of ``|V(x) - V(y) - V_{tau_y omega}(x - y)|`` over all site pairs.

    ``V_{tau_y omega}`` is rebuilt by summing ``G`` along staircases started at
    ``y``; ``V`` is read from the stored table, periodically extended.
    """
    corrector.require_field(field)
    vgrid = corrector.v_grid()
    worst = 0.0
    coords = field.site_coords(np.arange(field.n_sites))
    axes = tuple(range(field.dim))
    for y, vy in zip(coords, corrector.v):
        shifted = staircase(field, corrector.grad, base=y)           # V_{tau_y}(z), z in box
        lhs = np.roll(vgrid, tuple(-int(c) for c in y), axis=axes) - vy   # V(y + z) - V(y)
        worst = max(worst, float(np.max(np.abs(lhs - shifted))))
    return worst


def verify_field(field: ConductanceField, epsilon: float = 0.1, neumann_tol: float = 1e-9,
                 corrector: CorrectorField | None = None) -> dict:
    """Run every identity check on one field; returns named residuals.

    Pass ``corrector`` to check a given (possibly corrupted) corrector instead
    of the freshly solved one.
    """
    env = build_environment(field, check=False)
    out = dict(env.residuals())
    d = local_drift(field)
    out["drift_q_mean"] = drift_q_mean(env, d)
    g = solve_poisson(env, d, epsilon)
    out["poisson"] = poisson_residual(env, g, d, epsilon)
    gn = neumann_series(env, d, epsilon, neumann_tol)
    out["neumann_vs_direct"] = float(np.max(np.abs(gn - g)))
    corr = limit_gradient(env, d) if corrector is None else corrector
    out["plaquette"] = plaquette_residual(corr)
    out["harmonic"] = check_harmonic(field, corr)
    out["stationary_gradient"] = check_stationary_gradient(field, corr)
    out["torus_winding"] = torus_winding_residual(corr)
    sites = field.site_coords(np.arange(field.n_sites))
    out["corrected_martingale"] = float(np.max(np.abs(corrected_martingale_means(field, corr, sites))))
    return out


def failures(residuals: dict, tolerances: dict = HARD_TOLERANCES) -> dict:
    return {k: v for k, v in residuals.items() if k in tolerances and not v <= tolerances[k]}

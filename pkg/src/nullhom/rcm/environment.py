"""The environment seen from the particle, its Poisson equation, and the corrector.

On the torus the translated environments ``tau_x omega`` are indexed by the
site ``x``, so the environment operator is the matrix

    (Pi_hat g)(x) = sum_e pi_omega(x, x+e) g(x+e)

with invariant law ``q(x)`` proportional to the total conductance at ``x``.
The corrector comes from ``g`` solving ``(I - Pi_hat) g = d`` with ``d`` the
local drift; its gradient ``G(x, e) = g(x+e) - g(x)`` summed along lattice
paths gives ``V(x)``, and ``x + V(x)`` is harmonic for the walk.

The torus makes ``V`` automatically periodic and therefore bounded.  Growth
of the infinite-volume corrector is only probed by scanning ``L``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..errors import FieldMismatch, MaxIterations, NotIrreducible, SolverFailure
from .field import ConductanceField, directions

INVARIANT_TOL = 1e-12
POISSON_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class EnvironmentChain:
    field: ConductanceField
    pi_hat: sp.csr_matrix
    q: np.ndarray

    @property
    def n_env(self) -> int:
        return self.q.shape[0]

    def residuals(self) -> dict:
        """Stochasticity, invariance and self-adjointness defects (max norm)."""
        P = self.pi_hat
        flux = sp.diags(self.q) @ P
        return {
            "row_sum": float(np.max(np.abs(np.asarray(P.sum(axis=1)).ravel() - 1))),
            "q_invariance": float(np.max(np.abs(P.T @ self.q - self.q))),
            "self_adjoint": float(abs(flux - flux.T).max()),
        }


def build_environment(field: ConductanceField, check: bool = True) -> EnvironmentChain:
    """Assemble ``Pi_hat`` and the normalized invariant density ``q``.

    ``q(x)`` is the total conductance at ``x`` divided by its sum; detailed
    balance ``q(x) pi(x, y) = q(y) pi(y, x)`` holds because both sides equal
    the bond conductance over the normalizer.  With ``L = 2`` the steps
    ``+e`` and ``-e`` reach the same site and their probabilities are merged,
    so a row then has fewer than ``2 dim`` nonzero entries.
    """
    n = field.n_sites
    rows = np.repeat(np.arange(n), 2 * field.dim)
    P = sp.csr_matrix(
        (field.prob_table.ravel(), (rows, field.neighbor_table.ravel())), shape=(n, n)
    )
    P.sum_duplicates()
    tot = field.bond_table.sum(axis=1)
    q = tot / tot.sum()
    env = EnvironmentChain(field, P, q)
    if check:
        res = env.residuals()
        bad = {k: v for k, v in res.items() if v > INVARIANT_TOL}
        if bad:
            raise SolverFailure(f"environment chain invariants violated: {bad}")
    return env


def local_drift(field: ConductanceField) -> np.ndarray:
    """``d(x) = sum_e e pi(x, x+e)`` as an ``(n_sites, dim)`` array."""
    return field.prob_table @ directions(field.dim).astype(float)


def _as_env(env_or_field) -> EnvironmentChain:
    if isinstance(env_or_field, ConductanceField):
        return build_environment(env_or_field)
    return env_or_field


def _drift(env, drift):
    return local_drift(env.field) if drift is None else np.asarray(drift, dtype=float)


def solve_poisson(env: EnvironmentChain, drift=None, epsilon: float = 0.1) -> np.ndarray:
    """Direct solve of ``((1 + eps) I - Pi_hat) g = d``, one column per coordinate."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    env = _as_env(env)
    d = _drift(env, drift)
    A = ((1 + epsilon) * sp.identity(env.n_env, format="csc") - env.pi_hat).tocsc()
    try:
        g = spla.splu(A).solve(np.ascontiguousarray(d.reshape(env.n_env, -1)))
    except RuntimeError as exc:
        raise SolverFailure(str(exc)) from exc
    g = g.reshape(d.shape)
    res = np.max(np.abs(A @ g.reshape(env.n_env, -1) - d.reshape(env.n_env, -1))) if d.size else 0.0
    if not np.isfinite(res) or res > POISSON_TOL:
        raise SolverFailure(f"Poisson residual {res:.3e} above {POISSON_TOL}")
    return g


def neumann_series(env: EnvironmentChain, drift=None, epsilon: float = 0.1, tol: float = 1e-9,
                   max_iter: int = 1_000_000) -> np.ndarray:
    """Geometric series for ``((1 + eps) I - Pi_hat)^{-1} d``.

    ``g = sum_{n >= 0} Pi_hat^n d / (1 + eps)^(n + 1)``.  Dropping the outer
    ``1 / (1 + eps)`` gives ``d + sum_{n >= 1} Pi_hat^n d / (1 + eps)^n``, the
    solution for right-hand side ``(1 + eps) d`` (:func:`neumann_series_unscaled`).

    Stops after the term ``n`` at which ``|Pi_hat^n d|_max / ((1+eps)^n eps)``,
    which bounds the remaining tail since ``|Pi_hat|_inf = 1``, is at most ``tol``.
    """
    return (1 + epsilon) ** -1 * neumann_series_unscaled(env, drift, epsilon, tol, max_iter)


def neumann_series_unscaled(env: EnvironmentChain, drift=None, epsilon: float = 0.1, tol: float = 1e-9,
                            max_iter: int = 1_000_000) -> np.ndarray:
    """``d + sum_{n >= 1} Pi_hat^n d / (1 + eps)^n``, truncated as in :func:`neumann_series`."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    env = _as_env(env)
    d = _drift(env, drift)
    term = d.reshape(env.n_env, -1).copy()
    g = term.copy()
    scale = 1.0
    for n in range(max_iter + 1):
        if n > 0:
            term = env.pi_hat @ term
            scale /= 1 + epsilon
            g += scale * term
        if (np.max(np.abs(term)) if term.size else 0.0) * scale / epsilon <= tol:
            return g.reshape(d.shape)
    raise MaxIterations(f"Neumann series did not reach tol={tol} in {max_iter} terms")


def solve_limit(env: EnvironmentChain, drift=None) -> np.ndarray:
    """Solve ``(I - Pi_hat) g = d`` with the gauge ``g(0) = 0``.

    The system is singular with left null vector ``q``; it is solvable because
    ``q . d = 0``.  Row 0 is redundant, so it is replaced by the gauge.
    """
    env = _as_env(env)
    d = _drift(env, drift).reshape(env.n_env, -1)
    n = env.n_env
    A = (sp.identity(n, format="csr") - env.pi_hat).tolil()
    A.rows[0], A.data[0] = [0], [1.0]
    rhs = d.copy()
    rhs[0] = 0.0
    try:
        g = spla.splu(A.tocsc()).solve(np.ascontiguousarray(rhs))
    except RuntimeError as exc:
        raise NotIrreducible(f"limit Poisson equation is singular: {exc}") from exc
    full = g - env.pi_hat @ g - d
    res = float(np.max(np.abs(full))) if full.size else 0.0
    if not np.isfinite(res) or res > POISSON_TOL:
        raise SolverFailure(f"limit Poisson residual {res:.3e} above {POISSON_TOL}")
    return g


@dataclass(frozen=True, eq=False)
class CorrectorField:
    """Poisson solution, gradient field and corrector on the torus.

    ``g``: ``(n_sites, dim)``; ``grad``: ``(n_sites, 2 dim, dim)`` with
    ``grad[x, k] = g(x + e_k) - g(x)``; ``v``: ``(n_sites, dim)`` with
    ``v[0] = 0``.  ``epsilon`` is 0 for the limit solve.
    """

    field: ConductanceField
    g: np.ndarray
    grad: np.ndarray
    v: np.ndarray
    epsilon: float

    def require_field(self, field: ConductanceField) -> None:
        if not self.field.same_as(field):
            raise FieldMismatch("corrector was built from a different field")

    def v_grid(self) -> np.ndarray:
        return self.v.reshape(self.field.shape + (self.field.dim,))

    def with_v(self, v) -> "CorrectorField":
        """Copy with a replaced corrector table (used for fault injection)."""
        return CorrectorField(self.field, self.g, self.grad, np.asarray(v, dtype=float), self.epsilon)


def gradient_field(field: ConductanceField, g: np.ndarray) -> np.ndarray:
    g = g.reshape(field.n_sites, -1)
    return g[field.neighbor_table] - g[:, None, :]


def staircase(field: ConductanceField, grad: np.ndarray, base=None, extent: int | None = None) -> np.ndarray:
    """Sum the gradient along axis-ordered staircases.

    Returns ``W`` on the box ``[0, extent)^dim`` with ``W(z)`` the sum of
    ``G`` along the path from ``base`` to ``base + z`` that first moves along
    axis 0, then axis 1, and so on.  ``G`` is extended periodically.
    """
    dim, L = field.dim, field.L
    extent = L if extent is None else int(extent)
    base = np.zeros(dim, dtype=np.int64) if base is None else np.mod(np.asarray(base), L)
    comps = grad.shape[-1]
    gpos = grad[:, :dim, :].reshape(field.shape + (dim, comps))
    idx = [(base[i] + np.arange(extent)) % L for i in range(dim)]
    gpos = gpos[np.ix_(*idx)]                                    # (extent,)*dim + (dim, comps)
    out = np.zeros((extent,) * dim + (comps,))
    for i in range(dim):
        # coordinates after axis i sit at the staircase's base (offset 0)
        sl = (slice(None),) * (i + 1) + (0,) * (dim - i - 1) + (i,)
        line = gpos[sl]                                          # (extent,)*(i+1) + (comps,)
        acc = np.cumsum(line, axis=i)
        acc = np.concatenate([np.zeros_like(np.take(acc, [0], axis=i)), np.take(acc, np.arange(extent - 1), axis=i)], axis=i)
        out += acc.reshape(acc.shape[:-1] + (1,) * (dim - i - 1) + (comps,))
    return out


def corrector_from_potential(field: ConductanceField, g: np.ndarray, epsilon: float) -> CorrectorField:
    g = np.asarray(g, dtype=float).reshape(field.n_sites, -1)
    grad = gradient_field(field, g)
    v = staircase(field, grad).reshape(field.n_sites, -1)
    return CorrectorField(field, g, grad, v, float(epsilon))


def limit_gradient(env, drift=None) -> CorrectorField:
    """Corrector of the limit gradient field (``epsilon = 0``)."""
    env = _as_env(env)
    g = solve_limit(env, drift)
    return corrector_from_potential(env.field, g, 0.0)


def regularized_corrector(env, epsilon: float, drift=None) -> CorrectorField:
    """Corrector built from ``g_eps`` (gauge-shifted so that ``g(0) = 0``)."""
    env = _as_env(env)
    g = solve_poisson(env, drift, epsilon)
    return corrector_from_potential(env.field, g - g[0], epsilon)

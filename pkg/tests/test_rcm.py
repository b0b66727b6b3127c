import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nullhom.errors import FieldMismatch, InvalidBounds
from nullhom.rcm import checks, environment as envm, experiments, walks
from nullhom.rcm.field import (
    ConductanceField, constant_field, load_field, sample_field, save_field, transition_probs,
)
from nullhom.rng import RandomSource


def field_2d(seed=0, L=6):
    return sample_field(2, L, 1.0, 2.0, RandomSource(seed))


def dense_pi(field):
    """Transition matrix assembled one site at a time from bond lookups."""
    n = field.n_sites
    P = np.zeros((n, n))
    dirs = np.concatenate([np.eye(field.dim, dtype=int), -np.eye(field.dim, dtype=int)])
    for i in range(n):
        x = field.site_coords(i)
        for e, p in zip(dirs, transition_probs(field, x)):
            P[i, field.site_index(x + e)] += p
    return P


# -- field -----------------------------------------------------------------

def test_bounds():
    with pytest.raises(InvalidBounds):
        sample_field(2, 4, 2.0, 2.0, RandomSource(0))
    with pytest.raises(InvalidBounds):
        sample_field(2, 4, 0.0, 1.0, RandomSource(0))
    with pytest.raises(InvalidBounds):
        ConductanceField(1, 4, 1.0, 2.0, np.full((4, 1), 3.0))


def test_bond_symmetry():
    f = field_2d()
    for x in [(0, 0), (5, 3), (2, 5)]:
        for e in [(1, 0), (0, 1)]:
            y = np.add(x, e)
            assert f.bond(x, e) == f.bond(y, -np.asarray(e))


@pytest.mark.parametrize("binary", [False, True])
def test_field_io(tmp_path, binary):
    f = field_2d(3)
    save_field(tmp_path / "f.json", f, binary=binary)
    g = load_field(tmp_path / "f.json")
    assert g.same_as(f) and g.seed == f.seed


# -- environment -----------------------------------------------------------

@pytest.mark.parametrize("dim,L", [(1, 5), (2, 2), (2, 4), (3, 3)])
def test_pi_hat_matches_dense(dim, L):
    f = sample_field(dim, L, 0.5, 3.0, RandomSource(dim * 10 + L))
    env = envm.build_environment(f)
    np.testing.assert_allclose(env.pi_hat.toarray(), dense_pi(f), atol=1e-15)
    res = env.residuals()
    assert max(res.values()) <= 1e-12


def test_poisson_against_dense_solve():
    f = field_2d(1)
    env = envm.build_environment(f)
    d = envm.local_drift(f)
    P = dense_pi(f)
    for eps in (0.5, 0.1):
        g = envm.solve_poisson(env, d, eps)
        ref = np.linalg.solve((1 + eps) * np.eye(f.n_sites) - P, d)
        np.testing.assert_allclose(g, ref, atol=1e-11)
        np.testing.assert_allclose(envm.neumann_series(env, d, eps, tol=1e-12), ref, atol=1e-10)
        # the unscaled variant solves with right-hand side (1 + eps) d
        np.testing.assert_allclose(envm.neumann_series_unscaled(env, d, eps, tol=1e-12), (1 + eps) * ref, atol=1e-10)


def test_limit_solution_gauge():
    f = field_2d(2)
    env = envm.build_environment(f)
    g = envm.solve_limit(env)
    assert np.all(g[0] == 0)
    np.testing.assert_allclose(g - env.pi_hat @ g, envm.local_drift(f), atol=1e-10)


@pytest.mark.parametrize("seed", range(5))
def test_one_dimensional_corrector_closed_form(seed):
    # harmonic coordinate on a ring: phi(x+1) - phi(x) = c / w_x with c = L / sum(1/w)
    L = 9
    f = sample_field(1, L, 0.5, 4.0, RandomSource(seed))
    w = f.weights[:, 0]
    c = L / np.sum(1 / w)
    expected = np.concatenate([[0.0], np.cumsum(c / w - 1)[:-1]])
    corr = envm.limit_gradient(envm.build_environment(f))
    np.testing.assert_allclose(corr.v[:, 0], expected, atol=1e-12)


def test_constant_field_has_zero_corrector():
    f = constant_field(2, 5, 1.5)
    corr = envm.limit_gradient(envm.build_environment(f))
    assert np.max(np.abs(corr.v)) < 1e-14
    assert np.max(np.abs(envm.local_drift(f))) == 0


def test_epsilon_limit_monotone():
    f = field_2d(4)
    env = envm.build_environment(f)
    g0 = envm.solve_limit(env)
    errs = []
    for eps in (0.1, 0.01, 0.001):
        g = envm.solve_poisson(env, None, eps)
        errs.append(np.max(np.abs((g - g[0]) - g0)))
    assert errs[0] > errs[1] > errs[2]


# -- checks ----------------------------------------------------------------

@pytest.mark.parametrize("seed", range(3))
def test_verify_field_passes(seed):
    res = checks.verify_field(field_2d(seed, L=5))
    assert checks.failures(res) == {}


def test_fault_is_detected():
    f = field_2d(0, L=5)
    corr = envm.limit_gradient(envm.build_environment(f))
    v = corr.v.copy()
    v[7] += 0.1
    res = checks.verify_field(f, corrector=corr.with_v(v))
    assert "harmonic" in checks.failures(res)
    assert "stationary_gradient" in checks.failures(res)


def test_translated_field_corrector():
    # V_{tau_y omega}(z) = V(y + z) - V(y)
    f = field_2d(5, L=4)
    corr = envm.limit_gradient(envm.build_environment(f))
    y = np.array([1, 3])
    ty = f.translated(y)
    vt = envm.limit_gradient(envm.build_environment(ty)).v_grid()
    lhs = np.roll(corr.v_grid(), tuple(-y), axis=(0, 1)) - corr.v_grid()[tuple(y)]
    np.testing.assert_allclose(vt, lhs, atol=1e-10)


def test_periodicity_and_winding():
    f = field_2d(6, L=4)
    corr = envm.limit_gradient(envm.build_environment(f))
    assert checks.periodicity_residual(corr) < 1e-12
    assert checks.torus_winding_residual(corr) < 1e-12


def test_field_mismatch():
    corr = envm.limit_gradient(envm.build_environment(field_2d(0)))
    with pytest.raises(FieldMismatch):
        checks.check_harmonic(field_2d(1), corr)


# -- walks -----------------------------------------------------------------

def test_walk_steps_are_unit():
    f = field_2d(0)
    w = walks.simulate_quenched_walk(f, 500, RandomSource(1))
    assert w.nearest_neighbor()
    assert w.n == 500


def test_walk_empirical_probabilities():
    f = sample_field(1, 4, 1.0, 5.0, RandomSource(2))
    paths = walks.simulate_paths(f, 1, 40_000, RandomSource(3))
    right = np.mean(paths[:, 1, 0] == 1)
    assert right == pytest.approx(transition_probs(f, [0])[0], abs=0.01)


def test_walks_independent_of_threads():
    f = field_2d(0)
    a = walks.simulate_paths(f, 20, 20_000, RandomSource(5), threads=1)
    b = walks.simulate_paths(f, 20, 20_000, RandomSource(5), threads=3)
    assert np.array_equal(a, b)


def test_martingale_decomposition_mean_zero():
    f = field_2d(0)
    w = walks.simulate_quenched_walk(f, 5, RandomSource(0))
    z = walks.martingale_decomposition(w)
    assert np.all(z[0] == 0)


def test_corrected_martingale_modes():
    f = field_2d(1)
    corr = envm.limit_gradient(envm.build_environment(f))
    w = walks.simulate_quenched_walk(f, 20_000, RandomSource(1))
    ex = walks.corrected_martingale_check(w, corr, "exact")
    assert ex["max_abs_mean"] < 1e-10
    sm = walks.corrected_martingale_check(w, corr, "sampled")
    assert sm["mode"] == "sampled"


# -- experiments -----------------------------------------------------------

def test_azuma_bound_formula():
    assert experiments.azuma_bound(100, 0.25) == pytest.approx(np.exp(-10 / 8))


def test_exact_diffusivity_constant_field():
    # simple random walk in dim 2: covariance of one step is I / 2
    f = constant_field(2, 4)
    corr = envm.limit_gradient(envm.build_environment(f))
    np.testing.assert_allclose(experiments.exact_diffusivity(corr), np.eye(2) / 2, atol=1e-14)


def test_diffusivity_one_dimensional_harmonic_mean():
    # effective conductance on a ring: sigma^2 = harmonic mean / arithmetic mean of w
    f = sample_field(1, 7, 1.0, 3.0, RandomSource(8))
    w = f.weights[:, 0]
    corr = envm.limit_gradient(envm.build_environment(f))
    expect = (1 / np.mean(1 / w)) / np.mean(w)
    assert experiments.exact_diffusivity(corr)[0, 0] == pytest.approx(expect, rel=1e-12)


def test_scan_rows():
    rep = experiments.corrector_scan(2, 1.0, 2.0, [4, 6], 3, RandomSource(0))
    assert len(rep["rows"]) == 6
    assert experiments.scan_csv(rep).count("\n") == 7

from fractions import Fraction

import numpy as np
import pytest

from nullhom import mrw
from nullhom.diagnostics import (
    EquivalenceConfig, bundled_suite, classify, constant_sampler, growth_exponent, iid_sampler,
    lp_bound_check, mrw_sampler, random_irreducible_chain, schauder_map_checks,
    theorem_equivalence_experiment, tightness_diagnostic,
)
from nullhom.errors import InsufficientReps
from nullhom.rng import RandomSource
from nullhom.sequences import PathWindow

H = (16, 32, 64, 128, 256, 512)


def test_growth_exponent_power_law():
    h = np.array([10, 100, 1000])
    q = np.stack([2 * h ** 0.5, 5 * h ** 0.5], axis=1)
    expo, slopes = growth_exponent(h, q)
    assert expo == pytest.approx(0.5)
    assert classify(h, q, expo) == "growing"


def test_classify_flat():
    h = (10, 20, 40)
    q = np.ones((3, 2))
    assert classify(h, q, growth_exponent(h, q)[0]) == "tight-consistent"


def test_srw_grows_like_sqrt():
    rep = tightness_diagnostic(iid_sampler([-1, 1]), H, 2000, src=RandomSource(1))
    assert rep.verdict == "growing"
    assert rep.growth_exponent == pytest.approx(0.5, abs=0.08)


def test_drift_grows_linearly():
    rep = tightness_diagnostic(iid_sampler([-1, 1], [0.4, 0.6]), H, 500, src=RandomSource(2))
    assert rep.verdict == "growing" and rep.growth_exponent > 0.7


def test_constant_zero_is_tight():
    rep = tightness_diagnostic(constant_sampler(0.0), H, 100)
    assert rep.verdict == "tight-consistent" and rep.growth_exponent == 0


def test_coboundary_is_tight(three_state):
    f = mrw.make_null_homologous(three_state, [0, 1, Fraction(-1, 2)])
    rep = tightness_diagnostic(mrw_sampler(three_state, f), H, 500, src=RandomSource(3))
    assert rep.verdict == "tight-consistent"
    assert np.all(rep.quantile_values <= 1.5)


def test_insufficient_reps():
    with pytest.raises(InsufficientReps):
        tightness_diagnostic(constant_sampler(1.0), H, 50)


def test_threads_do_not_change_result(three_state):
    f = mrw.make_null_homologous(three_state, [0, 1, 2])
    s = mrw_sampler(three_state, f)
    a = tightness_diagnostic(s, H, 3000, src=RandomSource(4), threads=1)
    b = tightness_diagnostic(s, H, 3000, src=RandomSource(4), threads=4)
    assert np.array_equal(a.quantile_values, b.quantile_values)


def test_lp_bound_verdicts(three_state):
    f = mrw.make_null_homologous(three_state, [0, 1, 2])
    assert lp_bound_check(mrw_sampler(three_state, f), 2, H, 1000, RandomSource(5))["verdict"] == "bounded"
    assert lp_bound_check(iid_sampler([-1, 1]), 2, H, 1000, RandomSource(5))["verdict"] == "unbounded"


def test_csv_rows():
    rep = tightness_diagnostic(constant_sampler(1.0), H, 100)
    lines = rep.to_csv().strip().splitlines()
    assert lines[0] == "horizon,level,quantile" and len(lines) == 1 + len(H) * 2


def test_random_chain_irreducible():
    gen = np.random.default_rng(0)
    for _ in range(50):
        chain = random_irreducible_chain(gen, int(gen.integers(1, 8)))
        assert np.allclose(chain.transition.sum(axis=1), 1)


def test_bundled_suite_shape():
    suite = bundled_suite()
    assert len(suite) == 20
    for name, chain, f in suite:
        dec = mrw.decide_null_homology(chain, f)
        assert isinstance(dec, mrw.ShiftFunction) == name.startswith("coboundary")
        if name.startswith("perturbed"):
            assert abs(mrw.mean_increment(chain, f)[0]) > 0


def test_equivalence_single_instances(three_state):
    conf = EquivalenceConfig(horizons=H, reps=300)
    f = mrw.make_null_homologous(three_state, [0, 1, Fraction(-1, 2)])
    r = theorem_equivalence_experiment(three_state, f, conf)
    assert r["exact_decision"] == "YES" and not r["false_fire"]
    r = theorem_equivalence_experiment(three_state, f.perturbed((1, 2), Fraction(1, 2)), conf)
    assert r["exact_decision"] == "NO" and r["verdict"] == "growing" and not r["false_fire"]


def test_schauder_checks_exact():
    gen = np.random.default_rng(0)
    for _ in range(20):
        w = PathWindow(int(gen.integers(-10, 1)), gen.integers(-9, 10, size=(15, 2)))
        assert schauder_map_checks(w, 5)["all_exact"]

import math
from fractions import Fraction
from functools import reduce

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nullhom import mrw
from nullhom.errors import DimensionMismatch, NotIrreducible, NotStochastic, RequiresExactScalars
from nullhom.rng import RandomSource

from conftest import chains, random_chain, random_rationals


def cycle_sums(chain, f):
    """Brute-force sums of every simple directed cycle of the positive-edge digraph."""
    g = nx.DiGraph(list(chain.edges()))
    out = []
    for cyc in nx.simple_cycles(g):
        steps = zip(cyc, cyc[1:] + cyc[:1])
        out.append(sum((Fraction(f(s, t)[0]) for s, t in steps), Fraction(0)))
    return out


def frac_gcd(a, b):
    a, b = abs(a), abs(b)
    while b:
        a, b = b, a % b
    return a


def oracle_span(chain, f):
    return reduce(frac_gcd, cycle_sums(chain, f), Fraction(0))


def rational_f(chain, gen):
    vals = random_rationals(gen, len(chain.edges()), max_den=3, max_num=6)
    return mrw.IncrementFunction.from_mapping(chain, dict(zip(chain.edges(), vals)))


# -- validation -------------------------------------------------------------

def test_validate_rejects_bad_rows():
    with pytest.raises(NotStochastic):
        mrw.validate_chain([[0.5, 0.4], [0.5, 0.5]])
    with pytest.raises(NotStochastic):
        mrw.validate_chain([[1.2, -0.2], [0.5, 0.5]])


def test_validate_rejects_reducible():
    with pytest.raises(NotIrreducible):
        mrw.validate_chain([[1.0, 0.0], [0.5, 0.5]])


def test_stationary_two_state():
    a, b = 0.3, 0.6
    chain = mrw.validate_chain([[1 - a, a], [b, 1 - b]])
    np.testing.assert_allclose(chain.stationary, [b / (a + b), a / (a + b)], atol=1e-14)


def test_increments_must_cover_edges(three_state):
    with pytest.raises(DimensionMismatch):
        mrw.IncrementFunction.from_mapping(three_state, {(0, 1): 1})


# -- decision ---------------------------------------------------------------

def test_coboundary_decision(three_state):
    xi = [Fraction(0), Fraction(1), Fraction(-1, 2)]
    f = mrw.make_null_homologous(three_state, xi)
    dec = mrw.decide_null_homology(three_state, f)
    assert isinstance(dec, mrw.ShiftFunction)
    assert list(dec.values[:, 0]) == xi


def test_perturbed_counterexample(three_state):
    f = mrw.make_null_homologous(three_state, [Fraction(0), Fraction(1), Fraction(-1, 2)])
    g = f.perturbed((1, 2), Fraction(1, 2))
    dec = mrw.decide_null_homology(three_state, g)
    assert isinstance(dec, mrw.CounterexampleCycle)
    assert dec.cycle_sum[0] == Fraction(1, 2)
    assert dec.states[0] == dec.states[-1]


@settings(max_examples=60, deadline=None)
@given(chains(max_states=7), st.integers(0, 2**32 - 1))
def test_decision_agrees_with_cycle_oracle(chain, seed):
    f = rational_f(chain, np.random.default_rng(seed))
    sums = cycle_sums(chain, f)
    dec = mrw.decide_null_homology(chain, f)
    assert isinstance(dec, mrw.ShiftFunction) == all(s == 0 for s in sums)
    if isinstance(dec, mrw.CounterexampleCycle):
        # witness sum re-evaluated along the reported cycle
        total = Fraction(0)
        for (s, t), sign in zip(zip(dec.states, dec.states[1:]), dec.signs):
            total += f(s, t)[0] if sign > 0 else -f(t, s)[0]
        assert total == dec.cycle_sum[0] != 0


@settings(max_examples=60, deadline=None)
@given(chains(max_states=8), st.integers(0, 2**32 - 1))
def test_round_trip_exact(chain, seed):
    gen = np.random.default_rng(seed)
    xi = [Fraction(0)] + random_rationals(gen, chain.n_states - 1)
    dec = mrw.decide_null_homology(chain, mrw.make_null_homologous(chain, xi))
    assert isinstance(dec, mrw.ShiftFunction)
    assert list(dec.values[:, 0]) == xi


def test_real_valued_tolerance(three_state):
    xi = np.array([0.0, math.sqrt(2), math.pi])
    f = mrw.make_null_homologous(three_state, xi)
    assert isinstance(mrw.decide_null_homology(three_state, f), mrw.ShiftFunction)
    g = f.perturbed((1, 2), 1e-6)
    assert isinstance(mrw.decide_null_homology(three_state, g, tol=1e-9), mrw.CounterexampleCycle)
    assert isinstance(mrw.decide_null_homology(three_state, g, tol=1e-5), mrw.ShiftFunction)


def test_vector_increments(three_state):
    xi = np.array([[0, 0], [1, 2], [3, -1]])
    f = mrw.make_null_homologous(three_state, xi)
    dec = mrw.decide_null_homology(three_state, f)
    assert np.array_equal(dec.values.astype(int), xi)


# -- recovery ---------------------------------------------------------------

@pytest.mark.parametrize("a,b", [(0.3, 0.6), (0.1, 0.2), (0.9, 0.8)])
def test_recovery_two_state_closed_form(a, b):
    # xi = (0, 1): h_n(0) - h_n(1) = 1 - (1 - a - b)^n
    chain = mrw.validate_chain([[1 - a, a], [b, 1 - b]])
    f = mrw.make_null_homologous(chain, [0, 1])
    for n in (1, 2, 5, 10):
        est = mrw.recover_shift_function(chain, f, n).values[1, 0]
        assert est == pytest.approx(1 - (1 - a - b) ** n, abs=1e-13)


def test_recovery_converges(three_state):
    f = mrw.make_null_homologous(three_state, [0, 1, Fraction(-1, 2)])
    exact = np.array([0, 1, -0.5])
    errs = [np.max(np.abs(mrw.recover_shift_function(three_state, f, n).values[:, 0] - exact))
            for n in (4, 8, 16, 32, 64)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-10


# -- lattice ----------------------------------------------------------------

def two_state(values):
    chain = mrw.validate_chain([[0.5, 0.5], [0.5, 0.5]])
    f = mrw.IncrementFunction.from_function(chain, lambda s, t: values[t])
    return chain, f


@pytest.mark.parametrize("values,span", [((1, 3), 1), ((2, 4), 2), ((Fraction(1, 2), Fraction(3, 2)), Fraction(1, 2))])
def test_lattice_fixtures(values, span):
    chain, f = two_state(values)
    rep = mrw.lattice_span(chain, f)
    assert rep.span == span == oracle_span(chain, f)
    assert rep.shift_mod == (0, 0)


def test_lattice_degenerate(three_state):
    f = mrw.make_null_homologous(three_state, [0, 1, Fraction(-1, 2)])
    rep = mrw.lattice_span(three_state, f)
    assert rep.degenerate and rep.shift_mod is None


def test_lattice_refuses_real(three_state):
    f = mrw.make_null_homologous(three_state, np.array([0.0, 0.5, 1.0]))
    with pytest.raises(RequiresExactScalars):
        mrw.lattice_span(three_state, f)


@settings(max_examples=80, deadline=None)
@given(chains(max_states=5), st.integers(0, 2**32 - 1))
def test_lattice_matches_oracle(chain, seed):
    f = rational_f(chain, np.random.default_rng(seed))
    rep = mrw.lattice_span(chain, f)
    assert rep.span == oracle_span(chain, f)
    if rep.span:
        d = rep.span
        for s, t in chain.edges():
            r = f(s, t)[0] - (rep.shift_mod[t] - rep.shift_mod[s])
            assert (r / d).denominator == 1


# -- simulation -------------------------------------------------------------

def test_coboundary_trajectory_telescopes(three_state):
    xi = [Fraction(0), Fraction(1), Fraction(-1, 2)]
    f = mrw.make_null_homologous(three_state, xi)
    traj = mrw.simulate_mrw(three_state, f, 2000, RandomSource(3))
    assert traj.check(f)
    expect = np.array([xi[s] - xi[traj.states[0]] for s in traj.states], dtype=object)
    assert np.all(np.array([Fraction(int(x), traj.denominator) for x in traj.sums[:, 0]], dtype=object) == expect)


def test_simulation_reproducible(three_state):
    f = mrw.make_null_homologous(three_state, [0, 1, 2])
    a = mrw.simulate_mrw(three_state, f, 500, RandomSource(9))
    b = mrw.simulate_mrw(three_state, f, 500, RandomSource(9))
    assert np.array_equal(a.states, b.states)


def test_empirical_transitions(three_state):
    states = mrw.simulate_states(three_state, 200_000, 1, np.random.default_rng(0))[0]
    counts = np.zeros((3, 3))
    np.add.at(counts, (states[:-1], states[1:]), 1)
    emp = counts / counts.sum(axis=1, keepdims=True)
    np.testing.assert_allclose(emp, three_state.transition, atol=0.01)


def test_alternating_chain():
    chain = mrw.validate_chain([[0, 1], [1, 0]])
    f = mrw.make_null_homologous(chain, [0, 1])
    traj = mrw.simulate_mrw(chain, f, 6, RandomSource(0), start=0)
    assert traj.values[:, 0].tolist() == [0, 1, 0, 1, 0, 1, 0]


# -- JSON -------------------------------------------------------------------

def test_json_round_trip(tmp_path, three_state):
    f = mrw.make_null_homologous(three_state, [0, Fraction(1, 3), 2])
    mrw.save_chain(tmp_path / "c.json", three_state, f)
    chain, g = mrw.load_chain(tmp_path / "c.json")
    assert np.array_equal(chain.transition, three_state.transition)
    assert g.exact and all(np.all(g(*e) == f(*e)) for e in f.edge_values)


def test_bundled_instances():
    from importlib import resources
    import json
    base = resources.files("nullhom") / "data"
    chain, f = mrw.chain_from_dict(json.loads((base / "coboundary.json").read_text()))
    assert isinstance(mrw.decide_null_homology(chain, f), mrw.ShiftFunction)
    chain, f = mrw.chain_from_dict(json.loads((base / "perturbed.json").read_text()))
    assert isinstance(mrw.decide_null_homology(chain, f), mrw.CounterexampleCycle)

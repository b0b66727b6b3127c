from fractions import Fraction

import numpy as np
import pytest
from hypothesis import strategies as st

from nullhom import mrw
from nullhom.rng import RandomSource


def random_chain(gen, n, density=0.5):
    """Irreducible chain on ``n`` states built independently of the library's generator."""
    W = np.zeros((n, n))
    perm = gen.permutation(n)
    for i in range(n):
        W[perm[i], perm[(i + 1) % n]] = gen.integers(1, 5)
    extra = (gen.random((n, n)) < density) * gen.integers(1, 5, size=(n, n))
    W = np.where(W > 0, W, extra)
    P = W / W.sum(axis=1, keepdims=True)
    return mrw.validate_chain(P)


def random_rationals(gen, size, max_den=6, max_num=12):
    return [Fraction(int(gen.integers(-max_num, max_num + 1)), int(gen.integers(1, max_den + 1)))
            for _ in range(size)]


@st.composite
def chains(draw, min_states=1, max_states=6):
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(min_states, max_states))
    return random_chain(np.random.default_rng(seed), n)


@pytest.fixture
def three_state():
    P = np.array([[0.2, 0.5, 0.3], [0.4, 0.1, 0.5], [0.6, 0.4, 0.0]])
    return mrw.validate_chain(P, labels=["a", "b", "c"])


@pytest.fixture
def src():
    return RandomSource(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

import numpy as np
import pytest

from nullhom.rng import RandomSource, block_sizes, map_blocks


def test_same_source_same_stream():
    a = RandomSource(7).generator().random(5)
    b = RandomSource(7).generator().random(5)
    assert np.array_equal(a, b)


def test_children_differ():
    src = RandomSource(7)
    assert not np.array_equal(src.child(0).generator().random(5), src.child(1).generator().random(5))
    assert not np.array_equal(RandomSource(7, 1).generator().random(5), src.generator().random(5))


def test_seed_range():
    with pytest.raises(ValueError):
        RandomSource(-1)
    RandomSource(2**64 - 1).generator()


def test_block_sizes():
    assert block_sizes(2500, 1000) == [1000, 1000, 500]
    assert block_sizes(0) == []


def test_map_blocks_thread_invariant():
    fn = lambda gen, n: gen.standard_normal(n)
    a = np.concatenate(map_blocks(fn, 5000, RandomSource(1), threads=1, block=700))
    b = np.concatenate(map_blocks(fn, 5000, RandomSource(1), threads=4, block=700))
    assert a.shape == (5000,) and np.array_equal(a, b)

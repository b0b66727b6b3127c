"""Reproducible random streams.

A :class:`RandomSource` names a Philox stream by ``(seed, stream)``.  Philox is
counter based, so generators built from the same pair produce bit-identical
draws on every platform, and distinct stream ids give independent streams.
Child streams (one per block of Monte Carlo replicas) are derived from the
parent through :class:`numpy.random.SeedSequence` spawn keys.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence, TypeVar

import numpy as np

_U64 = (1 << 64) - 1

T = TypeVar("T")

#: Replicas per child stream.  Fixed, so results never depend on thread count.
BLOCK_SIZE = 1024


@dataclass(frozen=True)
class RandomSource:
    seed: int
    stream: int = 0
    path: tuple[int, ...] = ()

    def __post_init__(self):
        for v in (self.seed, self.stream, *self.path):
            if not (0 <= int(v) <= _U64):
                raise ValueError(f"seed/stream values must fit in 64 unsigned bits, got {v}")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream), *self.path))
        return np.random.Generator(np.random.Philox(ss))

    def child(self, index: int) -> "RandomSource":
        return RandomSource(self.seed, self.stream, self.path + (int(index),))

    def record(self) -> dict:
        return {"seed": int(self.seed), "stream": int(self.stream), "path": list(self.path)}


def block_sizes(reps: int, block: int = BLOCK_SIZE) -> list[int]:
    full, rest = divmod(int(reps), block)
    return [block] * full + ([rest] if rest else [])


def map_blocks(
    fn: Callable[[np.random.Generator, int], T],
    reps: int,
    src: RandomSource,
    threads: int | None = None,
    block: int = BLOCK_SIZE,
) -> list[T]:
    """Run ``fn(gen, size)`` on fixed-size replica blocks, one child stream each.

    Output order follows block order regardless of ``threads``.
    """
    sizes = block_sizes(reps, block)
    jobs = [(src.child(i), n) for i, n in enumerate(sizes)]
    if threads is None or threads <= 1 or len(jobs) <= 1:
        return [fn(s.generator(), n) for s, n in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda job: fn(job[0].generator(), job[1]), jobs))


def concat_blocks(parts: Sequence[np.ndarray]) -> np.ndarray:
    return np.concatenate(list(parts), axis=0)

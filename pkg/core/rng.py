"""Seeded random streams.

Every random decision in the package goes through a ``numpy.random.Generator``
(PCG64) built here, so a (seed, index) pair fully determines an augmentation.
"""

from __future__ import annotations

import numpy as np

from core.schemas import Permutation

RandomStream = np.random.Generator

_MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def hash64(seed: int, index: int) -> int:
    """Derive a per-item stream seed from a global seed and an item index.

    splitmix64 finalizer over ``seed + (index + 1) * 0x9E3779B97F4A7C15 (mod 2**64)``.
    Appending items to a batch never changes the seeds of earlier items.
    """
    z = (seed + (index + 1) * _GOLDEN_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def make_rng(seed: int) -> RandomStream:
    return np.random.Generator(np.random.PCG64(seed))


def stream_for(seed: int, index: int) -> RandomStream:
    return make_rng(hash64(seed, index))


def random_unit(rng: RandomStream) -> float:
    """Uniform draw in [0, 1)."""
    return float(rng.random())


def randbelow(rng: RandomStream, n: int) -> int:
    """Uniform integer in [0, n)."""
    return int(rng.integers(0, n))


def fisher_yates(n: int, rng: RandomStream) -> Permutation:
    """Uniform random permutation of range(n); j is drawn from [0, i] for i = n-1 .. 1."""
    mapping = list(range(n))
    for i in range(n - 1, 0, -1):
        j = randbelow(rng, i + 1)
        mapping[i], mapping[j] = mapping[j], mapping[i]
    return Permutation(mapping=mapping)

"""Reproducible random streams for instance generation.

Every generator draws from numpy's PCG64 bit generator seeded through a
``SeedSequence(entropy=seed, spawn_key=(stream,))``. Each instance field gets
its own stream number, so adding draws to one field never shifts another.
PCG64 and SeedSequence are specified by numpy and stable across platforms.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=int(seed),
                                                                      spawn_key=(int(key),))))


def uniform_int(gen: np.random.Generator, lo: int, hi: int) -> int:
    """Uniform integer in the closed range [lo, hi]."""
    return int(gen.integers(lo, hi, endpoint=True))

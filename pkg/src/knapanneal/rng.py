"""Deterministic random-stream policy.

All randomness in this package flows through numpy's PCG64 bit generator
seeded via ``numpy.random.SeedSequence``. A root seed plus an integer key
path identifies a substream: substream ``(k1, k2, ...)`` of seed ``s`` is
``SeedSequence(s, spawn_key=(k1, k2, ...))``. SeedSequence's mixing is a
fixed, documented algorithm, so every stream is bit-identical across runs
and platforms. Samplers give read ``i`` the substream ``(i,)``, which makes
read sets order-independent and prefix-stable: the first 100 reads of a
5000-read run equal the 100-read run with the same seed.
"""

from __future__ import annotations

import numpy as np


def seed_sequence(seed: int, *key: int) -> np.random.SeedSequence:
    """SeedSequence for substream `key` of `seed`."""
    return np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))


def generator(seed: int, *key: int) -> np.random.Generator:
    """PCG64 generator for substream `key` of `seed`."""
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, *key)))


def child_seed(seed: int, *key: int) -> int:
    """Derive a 64-bit child seed for substream `key` of `seed`.

    Used when an API boundary takes a plain integer seed (e.g. one trial of
    a multi-trial experiment) rather than a Generator.
    """
    return int(seed_sequence(seed, *key).generate_state(1, dtype=np.uint64)[0])

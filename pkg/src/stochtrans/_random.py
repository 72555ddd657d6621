"""Seeded random streams.

Every random draw in the package comes from a Philox bit generator keyed by
``SeedSequence(seed, spawn_key=(stream, *extra))``. Stream tags are small
integers, so two different purposes never share a stream for the same seed.

Stream layout
-------------
1  generator draws (values, weights, permutations)
2  pair presence in partial sampling
3  comparison outcomes (one uniform per unordered pair, row-major over i < j)
4  diagonal coin flips
5  heuristic restarts
"""
import hashlib

import numpy as np

GENERATOR = 1
PRESENCE = 2
OUTCOMES = 3
DIAGONAL = 4
RESTARTS = 5


def stream(seed, tag, *extra):
    if seed is None:
        seed = 0
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=(tag, *extra))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(base_seed, *keys):
    """Return ``base_seed XOR hash(keys)`` as a 64-bit seed."""
    h = hashlib.blake2b(digest_size=8)
    for k in keys:
        h.update(int(k).to_bytes(8, "little", signed=False))
    return int.from_bytes(h.digest(), "little") ^ (int(base_seed) & (2**64 - 1))

"""Seed derivation and random generators.

Every random draw in the package goes through :func:`make_rng`, a Philox
(counter-based) generator keyed by a 64-bit integer.  Child seeds are derived
with :func:`hash64`, a splitmix64 fold, so a work item's randomness depends
only on its indices and never on scheduling.

The mixing constants are::

    GOLDEN = 0x9E3779B97F4A7C15
    MIX1   = 0xBF58476D1CE4E5B9
    MIX2   = 0x94D049BB133111EB

and ``hash64(a, b, c) = mix(mix(mix(a) ^ b) ^ c)`` with ``mix`` the
splitmix64 finalizer applied to ``x + GOLDEN``.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB

__all__ = ["splitmix64", "hash64", "make_rng", "as_rng"]


def splitmix64(x):
    z = (int(x) + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def hash64(*values):
    """Fold any number of integers into one 64-bit seed."""
    if not values:
        raise ValueError("hash64 needs at least one value")
    h = splitmix64(int(values[0]) & MASK64)
    for v in values[1:]:
        h = splitmix64(h ^ (int(v) & MASK64))
    return h


def make_rng(seed):
    """Return a Philox-backed generator keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & MASK64))


def as_rng(seed_or_rng):
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return make_rng(seed_or_rng)

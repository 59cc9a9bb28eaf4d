"""Deterministic counter-based random streams.

Every stochastic component in this package (prediction sampling, iid
adversaries, state-space samplers) draws from a splitmix64 stream.  The
generator is counter-based: output k of a stream seeded with ``s`` is
``mix64(s + (k + 1) * GOLDEN)``, so scalar stepping and vectorised block
generation produce identical values.  The same integer arithmetic is
reimplemented inside the jitted simulation engine; tests pin the two
paths to equality, which is the reason for rolling a tiny generator
here instead of using numpy's.
"""

from __future__ import annotations

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# 2**-53, the spacing used to map the top 53 bits of a draw into [0, 1)
_INV53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    """splitmix64 finaliser on a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return (z ^ (z >> 31)) & MASK64


def child_seed(seed: int, index: int) -> int:
    """Derive a decorrelated child seed, e.g. one per replicate.

    Children of the same parent with distinct indices give streams that
    are independent for practical purposes; the derivation is pure
    integer mixing, so it is reproducible everywhere.
    """
    return mix64((mix64(seed) + ((index + 1) * GOLDEN)) & MASK64)


class Stream:
    """Scalar splitmix64 stream over python integers."""

    __slots__ = ("counter",)

    def __init__(self, seed: int):
        self.counter = seed & MASK64

    def next_u64(self) -> int:
        self.counter = (self.counter + GOLDEN) & MASK64
        return mix64(self.counter)

    def next_float(self) -> float:
        """Uniform draw in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _INV53

    def next_floats(self, n: int) -> np.ndarray:
        """Block of n uniform draws, identical to n scalar calls."""
        ks = np.arange(1, n + 1, dtype=np.uint64)
        z = np.uint64(self.counter) + np.uint64(GOLDEN) * ks
        self.counter = (self.counter + n * GOLDEN) & MASK64
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        z = z ^ (z >> np.uint64(31))
        return (z >> np.uint64(11)).astype(np.float64) * _INV53


def sample_index(p, u: float) -> int:
    """Inverse-CDF draw from a probability vector.

    Cells are half-open in ascending category order; u must lie in
    [0, 1).  Written so the jitted engine can compile the exact same
    function, keeping sampled trajectories identical across paths.
    """
    d = p.shape[0]
    cum = 0.0
    for k in range(d):
        cum += p[k]
        if u < cum:
            return k
    return d - 1

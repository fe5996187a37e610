"""Seeded randomness with deterministic substream derivation.

Every random draw in a session flows through a :class:`RandomSource`, so a
64-bit master seed pins the whole run.  Substreams (one per party, one per
Monte Carlo trial) are derived with a splitmix64 chain rather than numpy's
SeedSequence so the derivation is trivially portable and stable.
"""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One splitmix64 scramble step on a 64-bit word."""
    x = (x + _GOLDEN) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_seed(master: int, *path: int) -> int:
    """Derive a child seed from a master seed and an integer path.

    Deterministic and collision-resistant enough for desk-scale Monte Carlo:
    distinct paths give independent-looking streams.
    """
    h = splitmix64(master & _MASK64)
    for p in path:
        h = splitmix64(h ^ splitmix64(p & _MASK64))
    return h


class RandomSource:
    """Seeded random stream used for all protocol and simulator sampling."""

    def __init__(self, seed: int):
        self.seed = seed & _MASK64
        self._gen = np.random.default_rng(self.seed)

    def spawn(self, *path: int) -> "RandomSource":
        """A new independent source derived from this seed and ``path``."""
        return RandomSource(derive_seed(self.seed, *path))

    def random(self) -> float:
        return float(self._gen.random())

    def bit(self) -> int:
        return int(self._gen.integers(0, 2))

    def bits(self, k: int) -> tuple[int, ...]:
        return tuple(int(b) for b in self._gen.integers(0, 2, size=k))

    def integer(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        return int(self._gen.integers(0, n))

    def permutation(self, n: int) -> list[int]:
        return [int(i) for i in self._gen.permutation(n)]

    def sample(self, n: int, k: int) -> list[int]:
        """k distinct indices drawn uniformly from range(n)."""
        return [int(i) for i in self._gen.choice(n, size=k, replace=False)]

    def shuffle(self, items: list) -> None:
        self._gen.shuffle(items)

    def token(self, nbytes: int = 16) -> bytes:
        return self._gen.bytes(nbytes)

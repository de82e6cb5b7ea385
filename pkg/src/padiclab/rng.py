"""Portable 64-bit splitmix generator.

Draw sequences depend only on the seed, never on platform or Python version,
which is what makes experiment CSVs byte-reproducible.
"""

from __future__ import annotations

from typing import MutableSequence, Sequence

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """splitmix64 output finalizer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, index: int) -> int:
    """Seed of sub-stream ``index`` under ``master``."""
    return mix64(mix64(master) ^ mix64((index + 1) * GOLDEN))


class RngStream:
    """A seeded stream of 64-bit draws. Not safe to share between tasks."""

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self._state = self.seed

    def __repr__(self):
        return f"RngStream(seed={self.seed:#x})"

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN) & MASK64
        return mix64(self._state)

    def spawn(self, index: int) -> RngStream:
        return RngStream(derive_seed(self.seed, index))

    def randbelow(self, n: int) -> int:
        """Uniform integer in ``[0, n)``, unbiased by rejection."""
        if n < 1:
            raise ValueError("randbelow needs n >= 1")
        if n == 1:
            return 0
        if n > MASK64:
            raise ValueError("range exceeds 64 bits")
        limit = (MASK64 + 1) - (MASK64 + 1) % n
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]``, both ends included."""
        return lo + self.randbelow(hi - lo + 1)

    def choice(self, seq: Sequence):
        return seq[self.randbelow(len(seq))]

    def shuffle(self, seq: MutableSequence) -> None:
        for i in range(len(seq) - 1, 0, -1):
            j = self.randbelow(i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def permutation(self, n: int) -> list[int]:
        perm = list(range(n))
        self.shuffle(perm)
        return perm

"""Deterministic pseudo-random numbers with a fixed, documented algorithm.

Every stochastic operation in the package draws from this generator so
that results are reproducible bit for bit for a given seed, on any
machine. The algorithm is SplitMix64:

* state update: ``state = (state + 0x9E3779B97F4A7C15) mod 2**64``
* raw output: the SplitMix64 finalizer applied to the updated state
* ``randbelow(k)``: rejection sampling on the raw stream -- accept
  ``u < 2**64 - (2**64 mod k)`` and return ``u mod k`` -- which makes
  small-alphabet draws unbiased for every k

Because the state is an affine counter, the j-th raw output is a pure
function of (seed, j). ``fill`` exploits this to produce exactly the
stream that repeated ``randbelow`` calls would produce, vectorised with
numpy; it falls back to the scalar path in the (for k far below 2**64,
astronomically rare) event that a draw is rejected.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_SPLIT_SALT = 0xA5A5B5B5C5C5D5D5


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a bijective scramble of a 64-bit word."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, stream: int) -> int:
    """Derive an independent sub-seed for a named parallel stream.

    The salt keeps sub-seeds off the raw output stream of ``Rng(seed)``.
    """
    return mix64((seed ^ _SPLIT_SALT) + (stream + 1) * _GOLDEN)


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_MIX1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


class Rng:
    """SplitMix64 stream over a 64-bit counter.

    Not thread-safe; each thread (or trial) should own its instance,
    created from `derive_seed` when several streams are needed.
    """

    __slots__ = ("seed", "_count")

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self._count = 0

    def next_u64(self) -> int:
        self._count += 1
        return mix64(self.seed + self._count * _GOLDEN)

    def randbelow(self, k: int) -> int:
        """Uniform integer in [0, k), unbiased via rejection sampling."""
        if k <= 0:
            raise InvalidInputError(f"randbelow needs k >= 1, got {k}")
        limit = (MASK64 + 1) - ((MASK64 + 1) % k)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % k

    def fill(self, k: int, size: int) -> np.ndarray:
        """Vectorised equivalent of ``size`` successive randbelow(k) calls.

        Returns int64. Consumes the stream exactly like the scalar path,
        so scalar and bulk use can be mixed freely.
        """
        if k <= 0:
            raise InvalidInputError(f"fill needs k >= 1, got {k}")
        if size < 0:
            raise InvalidInputError(f"fill needs size >= 0, got {size}")
        if size == 0:
            return np.empty(0, dtype=np.int64)
        counters = np.arange(self._count + 1, self._count + size + 1, dtype=np.uint64)
        raw = _mix_array(np.uint64(self.seed) + counters * np.uint64(_GOLDEN))
        limit = (MASK64 + 1) - ((MASK64 + 1) % k)
        if limit <= MASK64 and bool((raw >= np.uint64(limit)).any()):
            # A rejection occurred somewhere in the batch; replay scalar.
            return np.array([self.randbelow(k) for _ in range(size)], dtype=np.int64)
        self._count += size
        return (raw % np.uint64(k)).astype(np.int64)

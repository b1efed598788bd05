"""Counter-based random streams (Philox4x32-10).

Every random number is a pure function of ``(key, counter)``, so a draw is
addressed by an integer index and a lane instead of by generator state.
Triplet ``i`` owns the indices ``3i, 3i+1, 3i+2``; this keeps generation
reproducible regardless of batching or thread layout.
"""
from __future__ import annotations

import numpy as np

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint32(0x9E3779B9)
_W1 = np.uint32(0xBB67AE85)
_MASK32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)


def philox4x32(counter, key, rounds=10):
    """Philox4x32 block function.

    ``counter`` is a ``(4, n)`` array of uint32 words, ``key`` a pair of
    uint32. Returns the ``(4, n)`` uint32 output block.
    """
    c0, c1, c2, c3 = (np.asarray(w, dtype=np.uint32) for w in counter)
    k0 = np.uint32(key[0])
    k1 = np.uint32(key[1])
    with np.errstate(over="ignore"):
        for _ in range(rounds):
            p0 = c0.astype(np.uint64) * _M0
            p1 = c2.astype(np.uint64) * _M1
            hi0 = (p0 >> _SHIFT32).astype(np.uint32)
            lo0 = (p0 & _MASK32).astype(np.uint32)
            hi1 = (p1 >> _SHIFT32).astype(np.uint32)
            lo1 = (p1 & _MASK32).astype(np.uint32)
            c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
            k0 = np.uint32(k0 + _W0)
            k1 = np.uint32(k1 + _W1)
    return np.stack([c0, c1, c2, c3])


def _split64(x):
    x = np.asarray(x, dtype=np.uint64)
    return (x & _MASK32).astype(np.uint32), (x >> _SHIFT32).astype(np.uint32)


class CounterStream:
    """Keyed family of independent uniform draws.

    ``seed`` becomes the 64-bit Philox key. ``stream`` selects a disjoint
    substream (it occupies one counter word), so ``spawn(k)`` yields
    streams that never overlap with the parent or with each other.
    """

    def __init__(self, seed: int, stream: int = 0):
        seed = int(seed)
        if seed < 0:
            raise ValueError("seed must be non-negative")
        self.seed = seed & 0xFFFFFFFFFFFFFFFF
        self.stream = int(stream) & 0xFFFF
        self._key = (self.seed & 0xFFFFFFFF, self.seed >> 32)

    def __repr__(self):
        return f"CounterStream(seed={self.seed}, stream={self.stream})"

    def spawn(self, stream: int) -> "CounterStream":
        return CounterStream(self.seed, stream)

    def raw(self, index, lane: int = 0) -> np.ndarray:
        """Four uint32 words per index for the given lane, shape ``(4, n)``."""
        lo, hi = _split64(np.atleast_1d(index))
        # lane in the low 16 bits, stream in the high 16 bits of word 2
        word2 = np.full(lo.shape, (self.stream << 16) | (int(lane) & 0xFFFF), dtype=np.uint32)
        word3 = np.full(lo.shape, int(lane) >> 16, dtype=np.uint32)
        return philox4x32((lo, hi, word2, word3), self._key)

    def uniform(self, index, lane: int = 0) -> np.ndarray:
        """Uniforms on the open interval (0, 1) with 53 bits of resolution."""
        block = self.raw(index, lane)
        bits = (block[0].astype(np.uint64) << _SHIFT32) | block[1].astype(np.uint64)
        return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53

    def normal(self, index, lane: int = 0) -> np.ndarray:
        """Standard normals by inverse-CDF transform of :meth:`uniform`."""
        from scipy.special import ndtri

        return ndtri(self.uniform(index, lane))

    def integers(self, index, high: int, lane: int = 0) -> np.ndarray:
        """Integers in ``[0, high)``; bias below 2**-20 for ``high < 2**32``."""
        return np.minimum((self.uniform(index, lane) * high).astype(np.int64), high - 1)

    def generator(self, index: int = 0) -> np.random.Generator:
        """A numpy Generator keyed from this stream, for bulk non-indexed work."""
        words = self.raw(np.array([index], dtype=np.uint64), lane=0xFFFF)[:, 0]
        return np.random.Generator(np.random.Philox(key=[int(words[0]) | (int(words[1]) << 32),
                                                         int(words[2]) | (int(words[3]) << 32)]))

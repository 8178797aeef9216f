"""Deterministic random numbers for every stochastic operation.

A single generator family (PCG64) is used across the codebase so that splits,
permutations and training batches are bit-reproducible across platforms for a
given (seed, stream) pair.  Named streams are derived from strings by hashing,
which keeps independent consumers (per-manifest splits, per-image shuffles,
training loops) from sharing a sequence.
"""

from __future__ import annotations

import hashlib

import numpy as np


def hash64(text: str) -> int:
    """Map a string to a stable 64-bit stream id (SHA-256 prefix)."""
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


class Rng:
    """PCG64 generator addressed by (seed, stream).

    Identical (seed, stream) pairs produce identical sequences on every
    platform.  ``stream`` may be an integer or a string (hashed via
    :func:`hash64`).
    """

    def __init__(self, seed: int, stream: int | str = 0):
        if isinstance(stream, str):
            stream = hash64(stream)
        self.seed = int(seed)
        self.stream = int(stream)
        seq = np.random.SeedSequence([self.seed & 0xFFFFFFFFFFFFFFFF,
                                      self.stream & 0xFFFFFFFFFFFFFFFF])
        self._gen = np.random.Generator(np.random.PCG64(seq))

    def integers(self, low: int, high: int) -> int:
        """Uniform integer in [low, high)."""
        return int(self._gen.integers(low, high))

    def random(self, n: int | None = None):
        """Uniform float64 in [0, 1); scalar if n is None."""
        if n is None:
            return float(self._gen.random())
        return self._gen.random(n)

    def normal(self, loc, scale, size=None):
        return self._gen.normal(loc, scale, size)

    def shuffle_draws(self, n: int) -> np.ndarray:
        """The n-1 uniforms that drive a Fisher-Yates shuffle of range(n)."""
        return self._gen.random(max(n - 1, 0))


def fisher_yates(n: int, rng: Rng, k: int | None = None) -> np.ndarray:
    """Fisher-Yates shuffle of range(n) using front-to-back swaps.

    Step i swaps position i with position i + floor(u_i * (n - i)), so the
    first k entries never depend on steps beyond k.  That prefix stability is
    what keeps a split's training prefix fixed when only the validation size
    changes.  With ``k`` given, only the first k entries are produced.
    """
    perm = np.arange(n, dtype=np.int64)
    draws = rng.shuffle_draws(n)
    stop = n - 1 if k is None else min(k, n - 1)
    for i in range(stop):
        j = i + int(draws[i] * (n - i))
        perm[i], perm[j] = perm[j], perm[i]
    return perm if k is None else perm[:k]

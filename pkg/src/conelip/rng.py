"""SplitMix64: a tiny, fully specified 64-bit generator.

Every random instance in the verification suites comes from this
generator, so another implementation can reproduce the instances from the
seed alone:

    state += 0x9E3779B97F4A7C15                       (mod 2^64)
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9          (mod 2^64)
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB          (mod 2^64)
    output z ^ (z >> 31)

``random()`` is ``(next >> 11) * 2^-53``. A case generator for suite ``s``
and case ``i`` under seed ``S`` starts from state
``S ^ (crc32(s) << 32) ^ (i * 0xD1B54A32D192ED03 mod 2^64)``.
"""

import math
import zlib

import numpy as np

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed=0):
        self.state = int(seed) & _MASK

    @classmethod
    def for_case(cls, seed, suite, index):
        s = int(seed) ^ (zlib.crc32(suite.encode()) << 32) ^ ((index * 0xD1B54A32D192ED03) & _MASK)
        return cls(s)

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def random(self):
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, lo=0.0, hi=1.0, size=None):
        if size is None:
            return lo + (hi - lo) * self.random()
        n = int(np.prod(size))
        return lo + (hi - lo) * np.array([self.random() for _ in range(n)]).reshape(size)

    def integers(self, lo, hi, size=None):
        """Uniform integers in ``[lo, hi)``."""
        span = hi - lo
        if span <= 0:
            raise ValueError("empty range")
        if size is None:
            return lo + self.next_u64() % span
        n = int(np.prod(size))
        return np.array([lo + self.next_u64() % span for _ in range(n)]).reshape(size)

    def normal(self, size=None):
        def one():
            u1 = 1.0 - self.random()
            u2 = self.random()
            return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

        if size is None:
            return one()
        n = int(np.prod(size))
        return np.array([one() for _ in range(n)]).reshape(size)

    def choice(self, seq):
        return seq[self.integers(0, len(seq))]

    def permutation(self, n):
        p = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.integers(0, i + 1)
            p[i], p[j] = p[j], p[i]
        return p

"""Seedable, splittable random streams.

Every stochastic operator in the package draws from a :class:`RandomStream`.
A stream is identified by a 64-bit seed plus a path of named substreams;
identical (seed, path, draw sequence) always reproduces identical values,
and substreams are independent, so adding draws to one operator never
perturbs another.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def _name_key(name: str) -> int:
    return int.from_bytes(hashlib.sha256(name.encode("utf-8")).digest()[:8], "big")


class RandomStream:
    """Deterministic PRNG stream with named substreams and a draw tally.

    Parameters
    ----------
    seed : int
        Root seed; reduced modulo 2**64.
    """

    def __init__(self, seed: int, _path: tuple[int, ...] = ()):
        self.seed = int(seed) & _MASK64
        self.path = tuple(_path)
        self.draw_count = 0
        ss = np.random.SeedSequence([self.seed, *self.path])
        self._gen = np.random.Generator(np.random.PCG64(ss))

    def substream(self, name: str) -> "RandomStream":
        """Derive an independent stream keyed by `name`.

        The derivation is stable: the same (seed, names...) path always
        yields the same stream, regardless of draw order elsewhere.
        """
        return RandomStream(self.seed, self.path + (_name_key(name),))

    # Draw methods mirror numpy.random.Generator but keep a running tally.

    def integers(self, low, high=None, size=None):
        out = self._gen.integers(low, high, size=size)
        self.draw_count += int(np.size(out))
        return out

    def random(self, size=None):
        out = self._gen.random(size)
        self.draw_count += int(np.size(out))
        return out

    def normal(self, loc=0.0, scale=1.0, size=None):
        out = self._gen.normal(loc, scale, size)
        self.draw_count += int(np.size(out))
        return out

    def choice_index(self, n: int) -> int:
        """Uniform index in [0, n)."""
        return int(self.integers(0, n))

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, path={self.path}, draws={self.draw_count})"

"""Seeded SplitMix64 stream used by every stochastic routine in the package.

The generator is SplitMix64 (Steele, Lea & Flood 2014)::

    state  <- (state + 0x9E3779B97F4A7C15) mod 2**64
    z      <- state
    z      <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2**64
    z      <- (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2**64
    output <- z ^ (z >> 31)

with the initial state equal to the seed reduced mod 2**64.  Because output
``i`` only depends on ``seed + (i + 1) * gamma`` the stream is produced in
numpy blocks and handed out one word at a time; the block size has no effect on
the values drawn.

Derived draws:

* ``below(n)``: uniform integer in ``[0, n)`` by rejection, drawing words until
  one falls below ``2**64 - (2**64 mod n)`` and returning it ``mod n``.
* ``spawn(i)``: child generator seeded with ``mix64(seed ^ mix64(i))`` where
  ``mix64`` is the SplitMix64 output function applied to its argument.

Reference stream for seed 42 (first ten words, hex)::

    bdd732262feb6e95 28efe333b266f103 47526757130f9f52 581ce1ff0e4ae394
    09bc585a244823f2 de4431fa3c80db06 37e9671c45376d5d ccf635ee9e9e2fa4
    5705b8770b3d7dd5 9e54d738297f77ae
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB
_BLOCK = 2048


def mix64(z: int) -> int:
    """SplitMix64 output function on a single 64-bit word."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MUL1) & MASK64
    z = ((z ^ (z >> 27)) * _MUL2) & MASK64
    return z ^ (z >> 31)


def _block(state: int, size: int) -> list[int]:
    steps = np.arange(1, size + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(state) + steps * np.uint64(GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MUL1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MUL2)
        z = z ^ (z >> np.uint64(31))
    return z.tolist()


class Rng:
    """Deterministic 64-bit stream; identical seeds give identical draws."""

    __slots__ = ("seed", "_state", "_buf", "_pos")

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._state = self.seed & MASK64
        self._buf: list[int] = []
        self._pos = 0

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed})"

    def _refill(self) -> None:
        self._buf = _block(self._state, _BLOCK)
        self._state = (self._state + _BLOCK * GAMMA) & MASK64
        self._pos = 0

    def next_u64(self) -> int:
        if self._pos == len(self._buf):
            self._refill()
        x = self._buf[self._pos]
        self._pos += 1
        return x

    def take(self, count: int) -> list[int]:
        """The next ``count`` words, in stream order."""
        out = self._buf[self._pos:self._pos + count]
        self._pos += len(out)
        while len(out) < count:
            self._refill()
            more = self._buf[:count - len(out)]
            self._pos = len(more)
            out.extend(more)
        return out

    def below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("below() needs a positive bound")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def random(self) -> float:
        """Uniform float in [0, 1) from the top 53 bits of one word."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def sample(self, population: range | list, k: int) -> list:
        """k distinct items, partial Fisher-Yates driven by ``below``."""
        pool = list(population)
        if not 0 <= k <= len(pool):
            raise ValueError("sample size out of range")
        for i in range(k):
            j = i + self.below(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def spawn(self, index: int) -> Rng:
        return Rng(mix64(self.seed ^ mix64(index)))

"""Seeded random number generation (xoshiro256**).

A single 64-bit seed expands through splitmix64 into the 256-bit xoshiro
state, so any implementation of the published constants reproduces the
same stream. Everything downstream (game generation, random starts,
diagnostic sampling) draws from this generator only.
"""

from __future__ import annotations

import math

import numpy as np

_MASK64 = (1 << 64) - 1


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31), state


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256StarStar:
    """xoshiro256** generator, seeded via splitmix64."""

    def __init__(self, seed: int):
        sm = seed & _MASK64
        state = []
        for _ in range(4):
            value, sm = _splitmix64(sm)
            state.append(value)
        if not any(state):  # all-zero state is invalid for xoshiro
            state[0] = 1
        self._s = state

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s[1] << 17) & _MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        """Uniform double in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        return low + (high - low) * self.random()

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection, bias-free."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = _MASK64 - (_MASK64 + 1) % n
        while True:
            v = self.next_u64()
            if v <= limit:
                return v % n

    def doubles(self, count: int) -> np.ndarray:
        return np.array([self.random() for _ in range(count)])

    def matrix(self, rows: int, cols: int) -> np.ndarray:
        return self.doubles(rows * cols).reshape(rows, cols)

    def interior_point(self, n: int) -> np.ndarray:
        """Random point in the interior of the n-simplex (Dirichlet(1))."""
        u = np.empty(n)
        for i in range(n):
            v = self.random()
            while v <= 0.0:
                v = self.random()
            u[i] = -math.log(v)
        return u / u.sum()

    def simplex_point(self, n: int, support_size: int | None = None) -> np.ndarray:
        """Random simplex point, optionally restricted to a random support."""
        if support_size is None or support_size >= n:
            return self.interior_point(n)
        if support_size < 1:
            raise ValueError("support_size must be >= 1")
        idx = list(range(n))
        chosen = []
        for _ in range(support_size):
            chosen.append(idx.pop(self.randint(len(idx))))
        x = np.zeros(n)
        x[sorted(chosen)] = self.interior_point(support_size)
        return x

"""Deterministic seedable PRNG used by every generator in the package.

The raw stream is xorshift64* (Marsaglia/Vigna):

    s ^= s >> 12;  s ^= s << 25;  s ^= s >> 27;  output = s * 0x2545F4914F6CDD1D

with all arithmetic mod 2**64. The 64-bit seed is passed through one
splitmix64 step (increment 0x9E3779B97F4A7C15, mixers 0xBF58476D1CE4E5B9 and
0x94D049BB133111EB) to form the initial nonzero state, so seed 0 is valid.
Uniform doubles take the top 53 bits, (output >> 11) * 2**-53 in [0, 1);
normal variates come from Box-Muller pairs with u1 = ((raw >> 11) + 1) * 2**-53
in (0, 1]. The integer stream is exact and identical across kernel backends.
"""

from __future__ import annotations

import math

import numpy as np

from . import backend

_MASK64 = 0xFFFFFFFFFFFFFFFF


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *tags: int) -> int:
    """Fold integer tags into a seed, for independent derived streams."""
    s = splitmix64(seed & _MASK64)
    for t in tags:
        s = splitmix64(s ^ (t & _MASK64))
    return s


class Prng:
    """xorshift64* stream with Box-Muller normal and complex-normal draws."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        state = splitmix64(seed & _MASK64)
        if state == 0:
            state = 0x9E3779B97F4A7C15
        self._state = state

    def raw_block(self, count: int) -> np.ndarray:
        self._state, out = backend.xorshift_block(self._state, count)
        self._state = int(self._state) & _MASK64
        return out

    def uniforms(self, count: int) -> np.ndarray:
        """Doubles in [0, 1)."""
        raw = self.raw_block(count)
        return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def uniform(self, low: float, high: float, count: int) -> np.ndarray:
        return low + (high - low) * self.uniforms(count)

    def normals(self, count: int) -> np.ndarray:
        pairs = (count + 1) // 2
        raw = self.raw_block(2 * pairs)
        top = (raw >> np.uint64(11)).astype(np.float64)
        u1 = (top[0::2] + 1.0) * 2.0**-53
        u2 = top[1::2] * 2.0**-53
        radius = np.sqrt(-2.0 * np.log(u1))
        angle = (2.0 * math.pi) * u2
        out = np.empty(2 * pairs)
        out[0::2] = radius * np.cos(angle)
        out[1::2] = radius * np.sin(angle)
        return out[:count]

    def complex_normals(self, count: int) -> np.ndarray:
        """Standard complex normals, E|z|^2 = 1."""
        z = self.normals(2 * count)
        return (z[0::2] + 1j * z[1::2]) / math.sqrt(2.0)

    def complex_matrix(self, rows: int, cols: int) -> np.ndarray:
        return self.complex_normals(rows * cols).reshape(rows, cols)

    def integers(self, low: int, high: int, count: int) -> np.ndarray:
        """Integers in [low, high], inclusive, by scaled uniforms."""
        u = self.uniforms(count)
        return low + np.minimum((u * (high - low + 1)).astype(np.int64), high - low)

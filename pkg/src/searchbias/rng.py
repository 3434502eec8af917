"""Counter-based pseudo-random numbers shared by every simulation backend.

The simulation kernels exist twice (compiled and pure numpy) and must
produce bit-identical sample streams, so they cannot use numpy's
``Generator`` objects: those are not available inside compiled kernels.
Instead each run owns a SplitMix64 stream, which is small enough to
implement identically in plain Python, vectorized numpy, and compiled
code. Statistical quality is more than sufficient for the sampling done
here (unit uniforms and small bit masks).

Seed derivation for replicate ``i`` of master seed ``s`` is
``mix64(s + (i + 1) * GAMMA)``, which scatters replicate streams across
the 2^64 state space.
"""

from __future__ import annotations

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
TWO_NEG53 = 2.0**-53


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, index: int) -> int:
    """Per-replicate stream seed (deterministic, well separated)."""
    if index < 0:
        raise ValueError("replicate index must be nonnegative")
    return mix64((master + GAMMA * (index + 1)) & MASK64)


class SplitMix64:
    """Scalar SplitMix64 stream; mirrors the kernels' in-loop arithmetic."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_word(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def next_unit(self) -> float:
        """Uniform float64 in [0, 1) with 53 random bits."""
        return (self.next_word() >> 11) * TWO_NEG53


def seeds_array(master: int, count: int) -> np.ndarray:
    """uint64 array of `count` derived replicate seeds."""
    return np.array([derive_seed(master, i) for i in range(count)], dtype=np.uint64)


# Vectorized stream advance used by the numpy backend: `states` is a uint64
# array holding one stream per replicate; each call advances every stream by
# exactly one draw, so per-replicate sequences match the scalar class above.

_U_GAMMA = np.uint64(GAMMA)
_U_M1 = np.uint64(_M1)
_U_M2 = np.uint64(_M2)
_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)


def next_words(states: np.ndarray) -> np.ndarray:
    """Advance every stream in-place; return one uint64 word per stream."""
    states += _U_GAMMA
    z = states.copy()
    z = (z ^ (z >> _U30)) * _U_M1
    z = (z ^ (z >> _U27)) * _U_M2
    return z ^ (z >> _U31)


def next_units(states: np.ndarray) -> np.ndarray:
    """Advance every stream; return one uniform [0,1) float64 per stream."""
    return (next_words(states) >> _U11).astype(np.float64) * TWO_NEG53

"""Counter-based SplitMix64 streams.

Draw ``i`` of a stream with key ``key`` is ``mix64(key + (i + 1) * GOLDEN)``,
so any slice of a stream can be produced without generating what precedes
it and results do not depend on batch sizes.  SplitMix64 is Sebastiano
Vigna's public-domain generator; the same finaliser doubles as the keyed
hash behind :class:`~gramlab.processes.FactOracle`.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """SplitMix64 finaliser on a Python integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= np.uint64(_M1)
    z ^= z >> np.uint64(27)
    z *= np.uint64(_M2)
    z ^= z >> np.uint64(31)
    return z


def derive_key(seed: int, *tags: int) -> int:
    """Independent stream key for ``seed`` and a tuple of small tags."""
    key = mix64(seed & MASK64)
    for t in tags:
        key = mix64(key ^ mix64((t + 1) * GOLDEN))
    return key


class Stream:
    """Sequential reader over one counter-based stream."""

    def __init__(self, key: int):
        self.key = key & MASK64
        self.counter = 0

    def raw(self, size: int) -> np.ndarray:
        idx = np.arange(self.counter + 1, self.counter + 1 + size, dtype=np.uint64)
        self.counter += size
        with np.errstate(over="ignore"):
            z = np.uint64(self.key) + idx * np.uint64(GOLDEN)
        return mix64_array(z)

    def uniform(self, size: int) -> np.ndarray:
        """Doubles in ``(0, 1]`` with 53 random bits."""
        z = self.raw(size)
        return ((z >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53

    def uniform1(self) -> float:
        return float(self.uniform(1)[0])

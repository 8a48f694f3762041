"""Portable random stream for noise calibration.

Uses the Philox-4x64 counter-based generator keyed directly by the seed, so a
seed always yields the same 64-bit words on every platform. Uniforms take the
top 53 bits of each word; normals come from the Box-Muller transform.
"""

from __future__ import annotations

import numpy as np


class PortableRNG:
    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError("seed must be nonnegative")
        self.seed = int(seed)
        self._bits = np.random.Philox(key=self.seed % (1 << 64))

    def uniform(self, size: int) -> np.ndarray:
        """Doubles in [0, 1)."""
        raw = self._bits.random_raw(size)
        return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))

    def normal(self, size: int) -> np.ndarray:
        half = (size + 1) // 2
        u1 = 1.0 - self.uniform(half)  # (0, 1], keeps log finite
        u2 = self.uniform(half)
        radius = np.sqrt(-2.0 * np.log(u1))
        angle = 2.0 * np.pi * u2
        out = np.empty(2 * half)
        out[0::2] = radius * np.cos(angle)
        out[1::2] = radius * np.sin(angle)
        return out[:size]

    def choice(self, n: int, k: int) -> np.ndarray:
        """``k`` distinct indices out of ``range(n)``, sorted ascending."""
        if not 0 <= k <= n:
            raise ValueError(f"cannot choose {k} of {n}")
        keys = self.uniform(n)
        return np.sort(np.argsort(keys, kind="stable")[:k])

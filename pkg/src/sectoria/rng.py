"""SplitMix64 random streams with Box-Muller normals.

The generator is fixed (rather than numpy's default bit generator) so that a
seed reproduces the same matrices in any language. SplitMix64 is a counter
generator: output k is ``mix(seed + (k + 1) * GAMMA)``, which lets whole
blocks be produced with vectorised uint64 arithmetic.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """SplitMix64 finaliser on a Python int."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """Deterministic stream of 64-bit words, uniforms and Gaussians.

    Parameters
    ----------
    seed : int
        Any integer; reduced modulo 2**64.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK
        self.counter = 0

    def next_u64(self, size: int) -> np.ndarray:
        k = np.arange(self.counter + 1, self.counter + 1 + size, dtype=np.uint64)
        self.counter += size
        state = np.uint64(self.seed) + k * np.uint64(GAMMA)
        return _mix_array(state)

    def uniform(self, size: int) -> np.ndarray:
        """Doubles in [0, 1) from the top 53 bits."""
        return (self.next_u64(size) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def normal(self, size: int) -> np.ndarray:
        """Standard normals via Box-Muller, consuming two uniforms per pair."""
        pairs = (size + 1) // 2
        u = self.uniform(2 * pairs).reshape(pairs, 2)
        r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
        phi = 2.0 * np.pi * u[:, 1]
        out = np.empty(2 * pairs)
        out[0::2] = r * np.cos(phi)
        out[1::2] = r * np.sin(phi)
        return out[:size]

    def complex_normal(self, shape) -> np.ndarray:
        """Complex Gaussian array with E|z|^2 = 1."""
        count = int(np.prod(shape))
        g = self.normal(2 * count).reshape(count, 2)
        return ((g[:, 0] + 1j * g[:, 1]) / np.sqrt(2.0)).reshape(shape)

    def split(self, key: int) -> "SplitMix64":
        """Independent child stream; depends only on (seed, key)."""
        return SplitMix64(mix64(self.seed ^ mix64((int(key) * GAMMA) & _MASK)))


def stream(seed: int, *keys: int) -> SplitMix64:
    """Child stream addressed by a path of integer keys."""
    rng = SplitMix64(seed)
    for key in keys:
        rng = rng.split(key)
    return rng

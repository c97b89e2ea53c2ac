"""Deterministic white-noise simulation and the variance stabilizing transform.

Noise is generated by a counter-based hash of (seed, row, col, channel), so
every sample is a pure function of its absolute coordinates: results are
bit-identical across runs, tilings and thread counts, with no generator
state to share.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .imagecore import CfaImage, PlanarImage

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = float(2.0 ** -53)


@dataclass(frozen=True)
class NoiseSpec:
    """Noise level in 8-bit intensity units plus the generator seed."""

    sigma0: float
    seed: int = 0

    def __post_init__(self):
        if not np.isfinite(self.sigma0) or self.sigma0 < 0:
            raise ValueError(f"sigma0 must be finite and >= 0, got {self.sigma0}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must fit in 64 unsigned bits")


def _splitmix64(x: np.ndarray) -> np.ndarray:
    # Finalizer of the splitmix64 generator; a bijection on 64-bit words
    # with full avalanche, evaluated here on whole arrays (wrapping mul).
    x = x + _GOLDEN
    x = (x ^ (x >> np.uint64(30))) * _MIX1
    x = (x ^ (x >> np.uint64(27))) * _MIX2
    return x ^ (x >> np.uint64(31))


def derive_seed(seed: int, index: int) -> int:
    """Stable per-item sub-seed, used to give corpus items independent streams."""
    with np.errstate(over="ignore"):
        h = _splitmix64(np.uint64(seed) ^ _splitmix64(np.uint64(index)))
    return int(h)


def standard_normal_field(seed: int, height: int, width: int, channels: int = 1,
                          row0: int = 0, col0: int = 0) -> np.ndarray:
    """(channels, height, width) standard normal deviates keyed on absolute coordinates.

    The value at (row0+i, col0+j, c) depends only on (seed, row0+i, col0+j, c),
    so any tiling of a larger field reproduces the same samples.
    """
    rows = np.arange(row0, row0 + height, dtype=np.uint64)
    cols = np.arange(col0, col0 + width, dtype=np.uint64)
    with np.errstate(over="ignore"):
        h0 = _splitmix64(np.uint64(seed))
        hr = _splitmix64(h0 ^ rows)[:, None]
        hrc = _splitmix64(hr ^ cols[None, :])
        out = np.empty((channels, height, width))
        for c in range(channels):
            hc = _splitmix64(hrc ^ np.uint64(c))
            hc2 = _splitmix64(hc ^ _GOLDEN)
            # Box-Muller; u1 in (0, 1] keeps the log finite.
            u1 = ((hc >> np.uint64(11)) + np.uint64(1)).astype(np.float64) * _INV_2_53
            u2 = (hc2 >> np.uint64(11)).astype(np.float64) * _INV_2_53
            out[c] = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
    return out


def add_awgn(x: CfaImage | PlanarImage, spec: NoiseSpec):
    """Add white Gaussian noise of level sigma0, without clipping."""
    if isinstance(x, CfaImage):
        if spec.sigma0 == 0.0:
            return replace(x, samples=x.samples.copy())
        z = standard_normal_field(spec.seed, x.height, x.width, channels=1)[0]
        return replace(x, samples=x.samples + spec.sigma0 * z)
    if isinstance(x, PlanarImage):
        if spec.sigma0 == 0.0:
            return replace(x, planes=x.planes.copy())
        z = standard_normal_field(spec.seed, x.height, x.width, channels=3)
        return replace(x, planes=x.planes + spec.sigma0 * z)
    raise TypeError(f"cannot add noise to {type(x).__name__}")


def vst_forward(x: CfaImage) -> CfaImage:
    """Square-root stabilizer t(v) = 2*sqrt(v + 3/8).

    Maps Poisson-distributed counts to approximately unit-variance Gaussian
    samples.  Requires every sample >= -3/8.
    """
    lo = float(np.min(x.samples))
    if lo < -0.375:
        raise ValueError(f"stabilizer undefined below -3/8, minimum sample is {lo}")
    return replace(x, samples=2.0 * np.sqrt(x.samples + 0.375))


def vst_inverse(x: CfaImage) -> CfaImage:
    """Algebraic inverse of :func:`vst_forward`: v = (t/2)^2 - 3/8.

    The plain algebraic inverse is adequate at intensities >= 10; it is
    biased in the very-low-count regime, which this pipeline does not use.
    """
    return replace(x, samples=np.square(x.samples * 0.5) - 0.375)

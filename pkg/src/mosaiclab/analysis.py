"""Demosaicked-noise statistics and the CPSNR / RMSE quality metrics.

Covariance statistics are computed on unclipped residual fields (clipping
would bias them), while the CPSNR metric is computed on clipped restored
images and the RMSE-versus-noise-level table defaults to the file-realistic
clipped chain.  These are deliberately distinct conventions; see each
function's contract.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .cfa import mosaic
from .demosaic import DemosaickerId, demosaic
from .imagecore import RGB, YUV_ISO, RGB_TO_YUV, BayerPattern, PlanarImage
from .noisegen import NoiseSpec, add_awgn, derive_seed

# Spatial offsets (s, t), row-major, used by every covariance table.
SPATIAL_OFFSETS = tuple((s, t) for s in range(3) for t in range(3))

RGB_CHANNELS = ("R", "G", "B")
YUV_CHANNELS = ("Y", "U", "V")


@dataclass(frozen=True)
class NoiseField:
    """Signed 3-plane residual between a restored image and its ground truth."""

    planes: np.ndarray
    colorspace: str = RGB

    def __post_init__(self):
        planes = np.asarray(self.planes, dtype=np.float64)
        if planes.ndim != 3 or planes.shape[0] != 3:
            raise ValueError(f"expected (3, height, width) planes, got {planes.shape}")
        if not np.all(np.isfinite(planes)):
            raise ValueError("noise field contains non-finite samples")
        object.__setattr__(self, "planes", planes)

    @property
    def height(self) -> int:
        return self.planes.shape[1]

    @property
    def width(self) -> int:
        return self.planes.shape[2]


@dataclass(frozen=True)
class SpatialCovTable:
    """Per-channel covariance and correlation against the 9 spatial offsets."""

    channels: tuple[str, str, str]
    offsets: tuple[tuple[int, int], ...]
    covariance: np.ndarray   # (3, 9)
    correlation: np.ndarray  # (3, 9); a zero-variance channel row is NaN
    defined: tuple[bool, bool, bool]

    def to_csv(self) -> str:
        header = "channel,statistic," + ",".join(f"\"({s},{t})\"" for s, t in self.offsets)
        lines = [header]
        for i, name in enumerate(self.channels):
            cov = ",".join(repr(float(v)) for v in self.covariance[i])
            lines.append(f"{name},covariance,{cov}")
            if self.defined[i]:
                corr = ",".join(repr(float(v)) for v in self.correlation[i])
            else:
                corr = ",".join(["undefined"] * len(self.offsets))
            lines.append(f"{name},correlation,{corr}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ChannelCovMatrix:
    """3x3 covariance and correlation across the color channels, pixels pooled."""

    channels: tuple[str, str, str]
    covariance: np.ndarray   # (3, 3)
    correlation: np.ndarray  # (3, 3)
    defined: tuple[bool, bool, bool]

    def to_csv(self) -> str:
        lines = ["channel,statistic," + ",".join(self.channels)]
        for i, name in enumerate(self.channels):
            cov = ",".join(repr(float(v)) for v in self.covariance[i])
            lines.append(f"{name},covariance,{cov}")
            if self.defined[i]:
                corr = ",".join(repr(float(v)) for v in self.correlation[i])
            else:
                corr = ",".join(["undefined"] * 3)
            lines.append(f"{name},correlation,{corr}")
        return "\n".join(lines) + "\n"


def demosaicked_noise(ground_truth: PlanarImage, pattern: BayerPattern,
                      spec: NoiseSpec, dm: DemosaickerId) -> NoiseField:
    """Residual of demosaicking a noisy mosaic of the ground truth, unclipped."""
    noisy = add_awgn(mosaic(ground_truth, pattern), spec)
    restored = demosaic(noisy, dm)
    return NoiseField(restored.planes - ground_truth.planes, RGB)


def _spatial_stats(plane: np.ndarray) -> tuple[np.ndarray, np.ndarray, bool]:
    mu = plane.mean()
    centered = plane - mu
    h, w = plane.shape
    cov = np.empty(len(SPATIAL_OFFSETS))
    for k, (s, t) in enumerate(SPATIAL_OFFSETS):
        a = centered[:h - s if s else h, :w - t if t else w]
        b = centered[s:, t:]
        cov[k] = float(np.mean(a * b))
    var = cov[0]
    if var <= 0.0:
        return cov, np.full(len(SPATIAL_OFFSETS), np.nan), False
    return cov, cov / var, True


def spatial_covariance(nf: NoiseField, space: str = RGB) -> SpatialCovTable:
    """Covariance of each channel with its (s, t)-shifted self, s,t in {0,1,2}.

    Estimates use the global channel mean and exclude pixels whose shifted
    partner falls outside the field (no padding).  With space="YUV-ISO" (or
    "YUV") the field is rotated into the isometric frame first.
    """
    if nf.height < 64 or nf.width < 64:
        raise ValueError("need at least a 64x64 field for covariance estimates")
    if space in (YUV_ISO, "YUV", "yuv"):
        planes = np.tensordot(RGB_TO_YUV, nf.planes, axes=(1, 0))
        names = YUV_CHANNELS
    elif space in (RGB, "rgb"):
        planes = nf.planes
        names = RGB_CHANNELS
    else:
        raise ValueError(f"unknown statistics space {space!r}")
    cov = np.empty((3, len(SPATIAL_OFFSETS)))
    corr = np.empty_like(cov)
    defined = []
    for i in range(3):
        cov[i], corr[i], ok = _spatial_stats(planes[i])
        defined.append(ok)
    return SpatialCovTable(names, SPATIAL_OFFSETS, cov, corr, tuple(defined))


def channel_covariance(nf: NoiseField) -> ChannelCovMatrix:
    """Sample covariance and correlation of the three channels, all pixels pooled."""
    if nf.height < 64 or nf.width < 64:
        raise ValueError("need at least a 64x64 field for covariance estimates")
    flat = nf.planes.reshape(3, -1)
    centered = flat - flat.mean(axis=1, keepdims=True)
    cov = centered @ centered.T / flat.shape[1]
    sd = np.sqrt(np.diag(cov))
    defined = tuple(bool(s > 0) for s in sd)
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = cov / np.outer(sd, sd)
    names = RGB_CHANNELS if nf.colorspace == RGB else YUV_CHANNELS
    return ChannelCovMatrix(names, cov, corr, defined)


def _mse_per_channel(a: PlanarImage, b: PlanarImage) -> np.ndarray:
    if a.planes.shape != b.planes.shape:
        raise ValueError(f"dimension mismatch: {a.planes.shape} vs {b.planes.shape}")
    if a.colorspace != b.colorspace:
        raise ValueError(f"colorspace mismatch: {a.colorspace} vs {b.colorspace}")
    diff = a.planes - b.planes
    return np.mean(diff * diff, axis=(1, 2))


def cpsnr(a: PlanarImage, b: PlanarImage) -> float:
    """Color PSNR in dB: 10*log10(255^2 / mean of the three channel MSEs).

    Identical images give math.inf (serialized as "inf" in CSV reports).
    """
    mse = float(np.sum(_mse_per_channel(a, b)) / 3.0)
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0 ** 2 / mse)


def rmse(a: PlanarImage, b: PlanarImage) -> float:
    """Root of the mean of the three channel MSEs."""
    return math.sqrt(float(np.sum(_mse_per_channel(a, b)) / 3.0))


def noise_field_rmse(nf: NoiseField) -> float:
    """RMSE of a residual field against zero."""
    return math.sqrt(float(np.mean(nf.planes * nf.planes)))


def rmse_vs_sigma_table(corpus: Sequence[PlanarImage], dm: DemosaickerId,
                        sigmas: Sequence[float], pattern: BayerPattern = BayerPattern.RGGB,
                        seed: int = 0, clip_chain: bool = True) -> list[tuple[float, float]]:
    """Corpus-mean RMSE of demosaicked noisy mosaics for each noise level.

    With clip_chain (the default) the measurement follows the file-based
    protocol of a physical raw pipeline: the noisy mosaic is clamped to the
    sensor range [0, 255] before demosaicking and the demosaicked image is
    clamped before scoring, so saturated regions censor part of the noise.
    With clip_chain=False the row reduces exactly to the RMSE of the
    unclipped residual field used by the covariance statistics.

    Image k keeps the sub-seed derive_seed(seed, k) across all levels, so
    the level sweep sees a common underlying noise realization per image.
    """
    if not corpus:
        raise ValueError("empty corpus")
    if not sigmas:
        raise ValueError("empty sigma list")
    rows = []
    for sigma in sigmas:
        vals = []
        for k, img in enumerate(corpus):
            spec = NoiseSpec(float(sigma), derive_seed(seed, k))
            if clip_chain:
                noisy = add_awgn(mosaic(img, pattern), spec)
                noisy = replace(noisy, samples=np.clip(noisy.samples, 0.0, 255.0))
                restored = demosaic(noisy, dm)
                diff = np.clip(restored.planes, 0.0, 255.0) - img.planes
                vals.append(math.sqrt(float(np.mean(diff * diff))))
            else:
                nf = demosaicked_noise(img, pattern, spec, dm)
                vals.append(noise_field_rmse(nf))
        rows.append((float(sigma), sum(vals) / len(vals)))
    return rows

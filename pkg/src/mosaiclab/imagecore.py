"""Image containers, the Bayer pattern model, and the orthonormal color rotation.

Images are stacks of float64 planes in the nominal [0, 255] range.
Out-of-range samples are allowed everywhere except at file I/O, so
intermediate pipeline stages never clip or quantize.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

RGB = "RGB"
YUV_ISO = "YUV-ISO"

# Orthonormal rotation of color space.  The first axis is the grey
# (luminance) diagonal, the other two span the chromatic plane; rows are
# orthonormal so the transform preserves Euclidean norms and isotropic
# covariance.
RGB_TO_YUV = np.array(
    [
        [1.0 / np.sqrt(3.0), 1.0 / np.sqrt(3.0), 1.0 / np.sqrt(3.0)],
        [1.0 / np.sqrt(2.0), 0.0, -1.0 / np.sqrt(2.0)],
        [1.0 / np.sqrt(6.0), -2.0 / np.sqrt(6.0), 1.0 / np.sqrt(6.0)],
    ]
)
YUV_TO_RGB = RGB_TO_YUV.T.copy()


class BayerPattern(Enum):
    """2x2 color filter layout, named by its row-major cell letters."""

    RGGB = "rggb"
    GRBG = "grbg"
    GBRG = "gbrg"
    BGGR = "bggr"

    def channel_at(self, row: int, col: int) -> int:
        """Channel index (0=R, 1=G, 2=B) sampled at pixel (row, col)."""
        letter = self.name[2 * (row % 2) + (col % 2)]
        return "RGB".index(letter)

    def channel_map(self, height: int, width: int) -> np.ndarray:
        """(height, width) int array of the channel index at every pixel."""
        cell = np.array(
            [[self.channel_at(0, 0), self.channel_at(0, 1)],
             [self.channel_at(1, 0), self.channel_at(1, 1)]],
            dtype=np.intp,
        )
        return np.tile(cell, ((height + 1) // 2, (width + 1) // 2))[:height, :width]

    def channel_masks(self, height: int, width: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Boolean site masks (red, green, blue)."""
        cm = self.channel_map(height, width)
        return cm == 0, cm == 1, cm == 2

    def site_offsets(self) -> tuple[tuple[int, int], tuple[int, int], tuple[int, int], tuple[int, int]]:
        """Cell offsets of (R, G1, G2, B), with G1 the green sharing a row with R."""
        pos = {(r, c): self.name[2 * r + c] for r in (0, 1) for c in (0, 1)}
        r_off = next(p for p, s in pos.items() if s == "R")
        b_off = next(p for p, s in pos.items() if s == "B")
        greens = [p for p, s in pos.items() if s == "G"]
        g1 = next(p for p in greens if p[0] == r_off[0])
        g2 = next(p for p in greens if p[0] != r_off[0])
        return r_off, g1, g2, b_off


def _as_float_plane(a: np.ndarray, what: str) -> np.ndarray:
    out = np.asarray(a, dtype=np.float64)
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{what} contains non-finite samples")
    return out


@dataclass(frozen=True)
class PlanarImage:
    """Full-resolution 3-channel image, planes stacked as (3, height, width)."""

    planes: np.ndarray
    colorspace: str = RGB

    def __post_init__(self):
        planes = _as_float_plane(self.planes, "image")
        if planes.ndim != 3 or planes.shape[0] != 3:
            raise ValueError(f"expected (3, height, width) planes, got {planes.shape}")
        if planes.shape[1] < 2 or planes.shape[2] < 2:
            raise ValueError("image must be at least 2x2")
        if self.colorspace not in (RGB, YUV_ISO):
            raise ValueError(f"unknown colorspace tag {self.colorspace!r}")
        object.__setattr__(self, "planes", planes)

    @property
    def height(self) -> int:
        return self.planes.shape[1]

    @property
    def width(self) -> int:
        return self.planes.shape[2]

    @classmethod
    def from_planes(cls, r: np.ndarray, g: np.ndarray, b: np.ndarray,
                    colorspace: str = RGB) -> "PlanarImage":
        return cls(np.stack([r, g, b]), colorspace)


@dataclass(frozen=True)
class CfaImage:
    """Single-plane Bayer mosaic with even dimensions so 2x2 cells tile exactly."""

    samples: np.ndarray
    pattern: BayerPattern

    def __post_init__(self):
        samples = _as_float_plane(self.samples, "mosaic")
        if samples.ndim != 2:
            raise ValueError(f"expected a 2-d sample plane, got shape {samples.shape}")
        h, w = samples.shape
        if h < 2 or w < 2 or h % 2 or w % 2:
            raise ValueError(f"mosaic dimensions must be even and >= 2, got {h}x{w}")
        object.__setattr__(self, "samples", samples)

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]


def rgb_to_yuv_iso(img: PlanarImage) -> PlanarImage:
    """Rotate RGB planes into the isometric luminance/chrominance frame.

    The luminance plane is (R+G+B)/sqrt(3); the two chroma planes are
    (R-B)/sqrt(2) and (R-2G+B)/sqrt(6).  Being a rotation, per-pixel
    Euclidean norm is preserved exactly.
    """
    if img.colorspace != RGB:
        raise ValueError(f"expected an {RGB} image, got {img.colorspace}")
    planes = np.tensordot(RGB_TO_YUV, img.planes, axes=(1, 0))
    return PlanarImage(planes, YUV_ISO)


def yuv_to_rgb_iso(img: PlanarImage) -> PlanarImage:
    """Inverse of :func:`rgb_to_yuv_iso` (the transpose of the rotation)."""
    if img.colorspace != YUV_ISO:
        raise ValueError(f"expected a {YUV_ISO} image, got {img.colorspace}")
    planes = np.tensordot(YUV_TO_RGB, img.planes, axes=(1, 0))
    return PlanarImage(planes, RGB)


def clip_to_range(img: PlanarImage, lo: float, hi: float) -> PlanarImage:
    """Clamp every sample into [lo, hi].  Idempotent."""
    if not lo < hi:
        raise ValueError(f"empty clip range [{lo}, {hi}]")
    return replace(img, planes=np.clip(img.planes, lo, hi))

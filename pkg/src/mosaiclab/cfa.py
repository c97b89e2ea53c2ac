"""Mosaicking and the CFA rearrangements consumed by raw-domain denoisers."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imagecore import RGB, BayerPattern, CfaImage, PlanarImage, _as_float_plane

# Phase translations used by the four-view decomposition, in view order.
PHASE_OFFSETS = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class HalfSizeQuad:
    """Half-size 4-plane repacking of a mosaic, planes ordered (R, G1, G2, B).

    G1 is the green site sharing a row with R.  The repacking is a pure
    permutation of samples, so recombination is lossless.
    """

    planes: np.ndarray
    pattern: BayerPattern

    def __post_init__(self):
        planes = _as_float_plane(self.planes, "quad")
        if planes.ndim != 3 or planes.shape[0] != 4:
            raise ValueError(f"expected (4, height/2, width/2) planes, got {planes.shape}")
        object.__setattr__(self, "planes", planes)

    @property
    def height(self) -> int:
        return self.planes.shape[1]

    @property
    def width(self) -> int:
        return self.planes.shape[2]


def mosaic(img: PlanarImage, pattern: BayerPattern) -> CfaImage:
    """Keep one channel per pixel according to the Bayer pattern, discard the rest."""
    if img.colorspace != RGB:
        raise ValueError(f"can only mosaic an {RGB} image, got {img.colorspace}")
    if img.height % 2 or img.width % 2:
        raise ValueError(f"mosaic needs even dimensions, got {img.height}x{img.width}")
    cm = pattern.channel_map(img.height, img.width)
    samples = np.take_along_axis(img.planes, cm[None, :, :], axis=0)[0]
    return CfaImage(samples.copy(), pattern)


def rearrange_half_size(cfa: CfaImage) -> HalfSizeQuad:
    """Split the mosaic into its four half-size phase planes (R, G1, G2, B)."""
    offs = cfa.pattern.site_offsets()
    planes = np.stack([cfa.samples[dy::2, dx::2] for dy, dx in offs])
    return HalfSizeQuad(planes.copy(), cfa.pattern)


def recombine_half_size(quad: HalfSizeQuad) -> CfaImage:
    """Exact inverse of :func:`rearrange_half_size`."""
    offs = quad.pattern.site_offsets()
    out = np.empty((2 * quad.height, 2 * quad.width), dtype=np.float64)
    for plane, (dy, dx) in zip(quad.planes, offs):
        out[dy::2, dx::2] = plane
    return CfaImage(out, quad.pattern)


def four_phase_views(cfa: CfaImage) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Full-size copies of the mosaic translated by each 2x2 phase offset.

    View t samples the mosaic at (i+dy, j+dx) for (dy, dx) in PHASE_OFFSETS,
    mirroring past the bottom/right edge, so each view presents the mosaic
    with a distinct phase alignment.  View 0 is an identity copy.
    """
    h, w = cfa.height, cfa.width
    padded = np.pad(cfa.samples, ((0, 1), (0, 1)), mode="symmetric")
    return tuple(padded[dy:dy + h, dx:dx + w].copy() for dy, dx in PHASE_OFFSETS)

"""Sigma-parameterized denoisers and the two raw-domain (CFA) adapters.

Both color denoisers work in the isometric luminance/chrominance frame and
are guided by the luminance plane; both collapse to a plain grayscale form
for single-plane inputs.  Every denoiser is the exact identity at sigma=0.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import ndimage

from .cfa import PHASE_OFFSETS, four_phase_views, rearrange_half_size, recombine_half_size
from .imagecore import RGB, YUV_ISO, CfaImage, PlanarImage, rgb_to_yuv_iso, yuv_to_rgb_iso


class DenoiserId(Enum):
    NLM_Y = "nlm"
    DCT_YUV = "dct"


@dataclass(frozen=True)
class DenoiserConfig:
    """Denoiser selection plus its noise-level parameter, in intensity units."""

    kind: DenoiserId
    sigma: float
    patch_radius: int = 3
    search_radius: int = 10
    block_size: int = 8

    def __post_init__(self):
        if not np.isfinite(self.sigma) or self.sigma < 0:
            raise ValueError(f"sigma must be finite and >= 0, got {self.sigma}")
        if self.patch_radius < 1 or self.search_radius < 1:
            raise ValueError("patch and search radii must be >= 1")
        if self.block_size < 2:
            raise ValueError("block size must be >= 2")


def _nlm_core(stack: np.ndarray, guide: np.ndarray, sigma: float,
              patch_radius: int, search_radius: int) -> np.ndarray:
    """Non-local means of each plane in `stack`, with weights computed on `guide`.

    Patch distances are mean squared differences over (2*patch_radius+1)^2
    windows of the guide; the noise-offset weights
    exp(-max(d^2 - 2*sigma^2, 0) / h^2) with h = 0.55*sigma (the classic
    bandwidth for mean patch distances) are shared by all planes so chroma
    follows the luminance geometry.
    """
    if sigma == 0.0:
        return stack.copy()
    h, w = guide.shape
    # reflect padding cannot exceed the plane size; small planes just get a
    # smaller search window
    sr = min(search_radius, h - 1, w - 1)
    diameter = 2 * patch_radius + 1
    h2 = (0.55 * sigma) ** 2
    noise_floor = 2.0 * sigma * sigma

    guide_pad = np.pad(guide, sr, mode="reflect")
    stack_pad = np.pad(stack, ((0, 0), (sr, sr), (sr, sr)), mode="reflect")
    num = np.zeros_like(stack)
    den = np.zeros((h, w))
    for dy in range(-sr, sr + 1):
        for dx in range(-sr, sr + 1):
            shifted = guide_pad[sr + dy:sr + dy + h, sr + dx:sr + dx + w]
            d2 = ndimage.uniform_filter((guide - shifted) ** 2, size=diameter, mode="mirror")
            wgt = np.exp(-np.maximum(d2 - noise_floor, 0.0) / h2)
            den += wgt
            num += wgt[None] * stack_pad[:, sr + dy:sr + dy + h, sr + dx:sr + dx + w]
    return num / den


def _dct_matrix(n: int) -> np.ndarray:
    k = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    d = np.sqrt(2.0 / n) * np.cos(np.pi * (2 * m + 1) * k / (2 * n))
    d[0, :] = np.sqrt(1.0 / n)
    return d


def _dct_denoise_plane(plane: np.ndarray, sigma: float, block: int = 8,
                       chunk_rows: int = 64) -> np.ndarray:
    """Sliding orthonormal block transform with hard thresholding at 3*sigma.

    Every block position (stride 1, mirror borders) is transformed, all
    non-DC coefficients below the threshold are zeroed, and the overlapping
    reconstructions are averaged uniformly (each pixel is covered by exactly
    block^2 positions after padding).
    """
    if sigma == 0.0:
        return plane.copy()
    h, w = plane.shape
    if h < block or w < block:
        raise ValueError(f"plane {h}x{w} smaller than one {block}x{block} block")
    pad = block - 1
    padded = np.pad(plane, pad, mode="reflect")
    acc = np.zeros_like(padded)
    d = _dct_matrix(block)
    threshold = 3.0 * sigma
    windows = sliding_window_view(padded, (block, block))
    n_rows, n_cols = windows.shape[:2]
    for r0 in range(0, n_rows, chunk_rows):
        blk = windows[r0:r0 + chunk_rows]
        coef = np.matmul(np.matmul(d, blk), d.T)
        keep = np.abs(coef) > threshold
        keep[..., 0, 0] = True
        rec = np.matmul(np.matmul(d.T, coef * keep), d)
        n = rec.shape[0]
        for u in range(block):
            for v in range(block):
                acc[r0 + u:r0 + u + n, v:v + n_cols] += rec[:, :, u, v]
    return acc[pad:pad + h, pad:pad + w] / float(block * block)


def denoise_nlm_y(img: PlanarImage, cfg: DenoiserConfig) -> PlanarImage:
    """Luminance-guided non-local means of a color image."""
    if cfg.kind is not DenoiserId.NLM_Y:
        raise ValueError(f"config selects {cfg.kind}, not NLM_Y")
    if img.colorspace != RGB:
        raise ValueError(f"expected an {RGB} image")
    if cfg.sigma == 0.0:
        return replace(img, planes=img.planes.copy())
    yuv = rgb_to_yuv_iso(img)
    out = _nlm_core(yuv.planes, yuv.planes[0], cfg.sigma, cfg.patch_radius, cfg.search_radius)
    return yuv_to_rgb_iso(PlanarImage(out, YUV_ISO))


def denoise_dct_yuv(img: PlanarImage, cfg: DenoiserConfig) -> PlanarImage:
    """Per-plane sliding block-transform thresholding in the luma/chroma frame."""
    if cfg.kind is not DenoiserId.DCT_YUV:
        raise ValueError(f"config selects {cfg.kind}, not DCT_YUV")
    if img.colorspace != RGB:
        raise ValueError(f"expected an {RGB} image")
    if cfg.sigma == 0.0:
        return replace(img, planes=img.planes.copy())
    yuv = rgb_to_yuv_iso(img)
    out = np.stack([_dct_denoise_plane(p, cfg.sigma, cfg.block_size) for p in yuv.planes])
    return yuv_to_rgb_iso(PlanarImage(out, YUV_ISO))


def denoise(img: PlanarImage, cfg: DenoiserConfig) -> PlanarImage:
    """Run the selected color denoiser."""
    if cfg.kind is DenoiserId.NLM_Y:
        return denoise_nlm_y(img, cfg)
    return denoise_dct_yuv(img, cfg)


def denoise_plane(plane: np.ndarray, cfg: DenoiserConfig) -> np.ndarray:
    """Grayscale form of the selected denoiser (guidance collapses to the plane itself)."""
    if cfg.sigma == 0.0:
        return plane.copy()
    if cfg.kind is DenoiserId.NLM_Y:
        return _nlm_core(plane[None], plane, cfg.sigma, cfg.patch_radius, cfg.search_radius)[0]
    return _dct_denoise_plane(plane, cfg.sigma, cfg.block_size)


def denoise_cfa_halfsize(cfa: CfaImage, cfg: DenoiserConfig) -> CfaImage:
    """Denoise the mosaic as two overlapping half-size 3-plane images.

    The (R, G1, G2, B) quad is split into (R, G1, B) and (R, G2, B), each
    denoised as a color image; each green comes from its own result while
    red and blue are averaged across the two.
    """
    quad = rearrange_half_size(cfa)
    r, g1, g2, b = quad.planes
    out_a = denoise(PlanarImage(np.stack([r, g1, b]), RGB), cfg)
    out_b = denoise(PlanarImage(np.stack([r, g2, b]), RGB), cfg)
    merged = np.stack([
        0.5 * (out_a.planes[0] + out_b.planes[0]),
        out_a.planes[1],
        out_b.planes[1],
        0.5 * (out_a.planes[2] + out_b.planes[2]),
    ])
    return recombine_half_size(replace(quad, planes=merged))


def denoise_cfa_fourphase(cfa: CfaImage, cfg: DenoiserConfig) -> CfaImage:
    """Denoise four phase-shifted copies of the mosaic and aggregate.

    Each view is denoised with the grayscale form, shifted back, and the
    estimates are averaged uniformly wherever they land inside the frame
    (all four in the interior, fewer along the leading row/column).
    """
    h, w = cfa.height, cfa.width
    acc = np.zeros((h, w))
    count = np.zeros((h, w))
    for (dy, dx), view in zip(PHASE_OFFSETS, four_phase_views(cfa)):
        restored = denoise_plane(view, cfg)
        acc[dy:, dx:] += restored[:h - dy, :w - dx]
        count[dy:, dx:] += 1.0
    return replace(cfa, samples=acc / count)

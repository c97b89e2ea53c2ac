"""Interpolating demosaickers: bilinear, Hamilton-Adams, residual interpolation.

All methods keep observed mosaic samples untouched and use parity-preserving
mirror extension at the borders, so no output pixel is dropped and mirrored
neighbors keep their color assignment.
"""
from __future__ import annotations

from enum import Enum

import numpy as np
from scipy import ndimage

from .imagecore import RGB, CfaImage, PlanarImage

# Normalized against the site mask, this kernel yields the mean of the
# nearest same-channel neighbors at every missing site: 2 along a row or
# column, or 4 across / 4 diagonal, depending on the pattern geometry.
_BILINEAR_KERNEL = np.array(
    [[1.0, 2.0, 1.0],
     [2.0, 4.0, 2.0],
     [1.0, 2.0, 1.0]]
)


class DemosaickerId(Enum):
    BILINEAR = "bilinear"
    HAMILTON_ADAMS = "ha"
    RESIDUAL = "ri"


def _interp_masked(values: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Neighbor-mean interpolation of sparse samples (values zero off-mask)."""
    num = ndimage.convolve(values, _BILINEAR_KERNEL, mode="mirror")
    den = ndimage.convolve(mask.astype(np.float64), _BILINEAR_KERNEL, mode="mirror")
    return num / den


def _require_min_size(cfa: CfaImage, n: int, name: str) -> None:
    if cfa.height < n or cfa.width < n:
        raise ValueError(f"{name} needs at least {n}x{n}, got {cfa.height}x{cfa.width}")


def demosaic_bilinear(cfa: CfaImage) -> PlanarImage:
    """Fill each missing sample with the mean of its nearest same-channel neighbors."""
    _require_min_size(cfa, 4, "bilinear demosaicking")
    masks = cfa.pattern.channel_masks(cfa.height, cfa.width)
    planes = np.empty((3, cfa.height, cfa.width))
    for c, mask in enumerate(masks):
        planes[c] = _interp_masked(cfa.samples * mask, mask)
        planes[c][mask] = cfa.samples[mask]
    return PlanarImage(planes, RGB)


def _axis_neighbors(cfa: CfaImage):
    """Center plus the four 1- and 2-step neighbor views of the mirror-padded mosaic."""
    xp = np.pad(cfa.samples, 2, mode="reflect")
    h, w = cfa.height, cfa.width
    center = xp[2:h + 2, 2:w + 2]
    horiz = (xp[2:h + 2, 1:w + 1], xp[2:h + 2, 3:w + 3],
             xp[2:h + 2, 0:w], xp[2:h + 2, 4:w + 4])
    vert = (xp[1:h + 1, 2:w + 2], xp[3:h + 3, 2:w + 2],
            xp[0:h, 2:w + 2], xp[4:h + 4, 2:w + 2])
    return center, horiz, vert


def green_direction_scores(cfa: CfaImage) -> tuple[np.ndarray, np.ndarray]:
    """Horizontal and vertical gradient-plus-Laplacian scores at every pixel.

    Only meaningful at red/blue sites, where the smaller score selects the
    green interpolation direction.  Exposed for inspection and testing.
    """
    c, (l1, r1, l2, r2), (u1, d1, u2, d2) = _axis_neighbors(cfa)
    dh = np.abs(l1 - r1) + np.abs(l2 - 2.0 * c + r2)
    dv = np.abs(u1 - d1) + np.abs(u2 - 2.0 * c + d2)
    return dh, dv


def _green_hamilton_adams(cfa: CfaImage) -> np.ndarray:
    """Directionally selected green plane, observed greens passed through."""
    c, (l1, r1, l2, r2), (u1, d1, u2, d2) = _axis_neighbors(cfa)
    dh = np.abs(l1 - r1) + np.abs(l2 - 2.0 * c + r2)
    dv = np.abs(u1 - d1) + np.abs(u2 - 2.0 * c + d2)
    est_h = 0.5 * (l1 + r1) + 0.25 * (2.0 * c - l2 - r2)
    est_v = 0.5 * (u1 + d1) + 0.25 * (2.0 * c - u2 - d2)
    # Ties average both directional estimates, keeping the result symmetric.
    est = np.where(dh < dv, est_h, np.where(dv < dh, est_v, 0.5 * (est_h + est_v)))

    _, green_mask, _ = cfa.pattern.channel_masks(cfa.height, cfa.width)
    return np.where(green_mask, cfa.samples, est)


def _chroma_from_differences(cfa: CfaImage, green: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Interpolate a sparse channel as green plus neighbor-mean color differences."""
    diff = (cfa.samples - green) * mask
    out = green + _interp_masked(diff, mask)
    out[mask] = cfa.samples[mask]
    return out


def demosaic_ha(cfa: CfaImage) -> PlanarImage:
    """Hamilton-Adams demosaicking.

    Green first: at each red/blue site the gradient-plus-Laplacian scores
    pick the interpolation direction, and the estimate is the neighbor-green
    mean corrected by a quarter of the lag-2 second difference of the center
    channel.  Red and blue then come from bilinear interpolation of the
    color differences against green.
    """
    _require_min_size(cfa, 6, "Hamilton-Adams demosaicking")
    green = _green_hamilton_adams(cfa)
    red_mask, _, blue_mask = cfa.pattern.channel_masks(cfa.height, cfa.width)
    red = _chroma_from_differences(cfa, green, red_mask)
    blue = _chroma_from_differences(cfa, green, blue_mask)
    return PlanarImage.from_planes(red, green, blue)


def _boxmean(x: np.ndarray, radius: int) -> np.ndarray:
    return ndimage.uniform_filter(x, size=2 * radius + 1, mode="mirror")


def _guided_fit_sparse(guide: np.ndarray, values: np.ndarray, mask: np.ndarray,
                       radius: int, eps: float) -> np.ndarray:
    """Local linear fit of sparse values against a dense guide (masked guided filter)."""
    m = mask.astype(np.float64)
    vm = values * m
    gm = guide * m
    n = _boxmean(m, radius)
    mean_g = _boxmean(gm, radius) / n
    mean_v = _boxmean(vm, radius) / n
    var_g = _boxmean(gm * guide, radius) / n - mean_g * mean_g
    cov_gv = _boxmean(guide * vm, radius) / n - mean_g * mean_v
    a = cov_gv / (var_g + eps)
    b = mean_v - a * mean_g
    return _boxmean(a, radius) * guide + _boxmean(b, radius)


def demosaic_ri(cfa: CfaImage) -> PlanarImage:
    """Residual interpolation: guided-filter tentative estimate plus interpolated residuals.

    Green comes from the Hamilton-Adams directional step.  For red and blue,
    a masked guided filter on the color differences against the green guide
    (box radius 2, regularizer (0.1*255)^2) produces a tentative difference
    plane; residuals at the observed sites are bilinearly interpolated, and
    green is added back.  Fitting differences rather than raw samples keeps
    the grey coupling of the output strong while the large regularizer stops
    the local fit from chasing noise in flat regions.
    """
    _require_min_size(cfa, 8, "residual-interpolation demosaicking")
    green = _green_hamilton_adams(cfa)
    red_mask, _, blue_mask = cfa.pattern.channel_masks(cfa.height, cfa.width)
    eps = (0.1 * 255.0) ** 2
    planes = [None, green, None]
    for c, mask in ((0, red_mask), (2, blue_mask)):
        diff = (cfa.samples - green) * mask
        tentative = _guided_fit_sparse(green, diff, mask, radius=2, eps=eps)
        residual = (diff - tentative) * mask
        plane = green + tentative + _interp_masked(residual, mask)
        plane[mask] = cfa.samples[mask]
        planes[c] = plane
    return PlanarImage(np.stack(planes), RGB)


_DISPATCH = {
    DemosaickerId.BILINEAR: demosaic_bilinear,
    DemosaickerId.HAMILTON_ADAMS: demosaic_ha,
    DemosaickerId.RESIDUAL: demosaic_ri,
}


def demosaic(cfa: CfaImage, method: DemosaickerId) -> PlanarImage:
    """Run the selected demosaicker."""
    return _DISPATCH[method](cfa)

import numpy as np
import pytest

from mosaiclab import (BayerPattern, CfaImage, DemosaickerId, PlanarImage,
                       clip_to_range, cpsnr, demosaic, demosaic_bilinear,
                       demosaic_ha, demosaic_ri, mosaic)
from mosaiclab.demosaic import green_direction_scores

ALL_METHODS = list(DemosaickerId)


def mirror(i, n):
    # parity-preserving reflection, matching the border convention of the
    # demosaickers (index -1 maps to 1, index n maps to n-2)
    if i < 0:
        return -i
    if i >= n:
        return 2 * n - 2 - i
    return i


def bilinear_oracle(cfa: CfaImage) -> np.ndarray:
    """Straightforward per-pixel reimplementation: mean of the nearest
    same-channel neighbors among the 8-neighborhood, mirrored at borders."""
    h, w = cfa.height, cfa.width
    cm = cfa.pattern.channel_map(h, w)
    ring = [(-1, 0), (1, 0), (0, -1), (0, 1),
            (-1, -1), (-1, 1), (1, -1), (1, 1)]
    out = np.empty((3, h, w))
    for i in range(h):
        for j in range(w):
            for c in range(3):
                if cm[i, j] == c:
                    out[c, i, j] = cfa.samples[i, j]
                    continue
                best, vals = None, []
                for di, dj in ring:
                    ii, jj = mirror(i + di, h), mirror(j + dj, w)
                    if cfa.pattern.channel_at(i + di, j + dj) != c:
                        continue
                    d = di * di + dj * dj
                    if best is None or d < best:
                        best, vals = d, [cfa.samples[ii, jj]]
                    elif d == best:
                        vals.append(cfa.samples[ii, jj])
                out[c, i, j] = np.mean(vals)
    return out


def constant_cfa(value, h=8, w=8, pattern=BayerPattern.RGGB):
    return CfaImage(np.full((h, w), float(value)), pattern)


def affine_image(h, w, a=1.5, b=-0.75, c=40.0):
    yy, xx = np.mgrid[0:h, 0:w].astype(float)
    plane = a * xx + b * yy + c
    return PlanarImage(np.stack([plane, plane, plane]))


class TestBilinear:
    def test_constant_cfa_gives_constant_color(self):
        out = demosaic_bilinear(constant_cfa(37.0))
        assert np.all(out.planes == 37.0)

    @pytest.mark.parametrize("pattern", list(BayerPattern))
    def test_exact_on_affine_interior(self, pattern):
        img = affine_image(10, 10)
        out = demosaic_bilinear(mosaic(img, pattern))
        assert np.allclose(out.planes[:, 2:-2, 2:-2], img.planes[:, 2:-2, 2:-2], atol=1e-12)

    @pytest.mark.parametrize("pattern", list(BayerPattern))
    def test_matches_per_pixel_oracle_exactly(self, rng, pattern):
        # Integer samples make every neighbor mean a dyadic rational, so the
        # two implementations must agree to the last bit.
        samples = rng.integers(0, 256, size=(4, 4)).astype(float)
        cfa = CfaImage(samples, pattern)
        out = demosaic_bilinear(cfa)
        assert np.array_equal(out.planes, bilinear_oracle(cfa))

    def test_matches_oracle_on_floats(self, rng):
        cfa = CfaImage(rng.uniform(0, 255, (6, 6)), BayerPattern.GBRG)
        out = demosaic_bilinear(cfa)
        assert np.abs(out.planes - bilinear_oracle(cfa)).max() < 1e-10

    def test_rejects_small_input(self):
        with pytest.raises(ValueError):
            demosaic_bilinear(constant_cfa(1.0, 2, 2))


class TestHamiltonAdams:
    def test_constant_cfa_gives_constant_color(self):
        out = demosaic_ha(constant_cfa(81.0))
        assert np.allclose(out.planes, 81.0, atol=1e-12)

    def test_vertical_step_edge_selects_vertical(self):
        # Step in every channel at column 3: columns 0-2 are 50, rest 200.
        plane = np.where(np.arange(8)[None, :] < 3, 50.0, 200.0)
        cfa = CfaImage(np.broadcast_to(plane, (8, 8)).copy(), BayerPattern.RGGB)
        dh, dv = green_direction_scores(cfa)
        # Hand-computed at the red site (2, 2): |50-200| + |50-100+200| = 300
        # horizontally, 0 + 0 vertically.
        assert dh[2, 2] == 300.0
        assert dv[2, 2] == 0.0
        red_mask, _, _ = cfa.pattern.channel_masks(8, 8)
        near_edge = np.zeros((8, 8), bool)
        near_edge[:, 2:4] = True
        assert np.all(dv[red_mask & near_edge] < dh[red_mask & near_edge])
        # the vertical choice keeps green clean across the edge
        out = demosaic_ha(cfa)
        assert out.planes[1, 2, 2] == 50.0

    def test_tie_averages_both_directions(self):
        out = demosaic_ha(constant_cfa(10.0))
        assert np.allclose(out.planes, 10.0, atol=1e-12)

    def test_rejects_small_input(self):
        with pytest.raises(ValueError):
            demosaic_ha(constant_cfa(1.0, 4, 4))


class TestResidualInterpolation:
    def test_constant_cfa_gives_constant_color(self):
        out = demosaic_ri(constant_cfa(63.0))
        assert np.allclose(out.planes, 63.0, atol=1e-9)

    def test_sampled_sites_pass_through(self, rng):
        cfa = CfaImage(rng.uniform(0, 255, (12, 12)), BayerPattern.BGGR)
        out = demosaic_ri(cfa)
        cm = cfa.pattern.channel_map(12, 12)
        for c in range(3):
            sites = cm == c
            assert np.array_equal(out.planes[c][sites], cfa.samples[sites])

    def test_beats_bilinear_on_clean_natural_images(self, corpus):
        ri_scores, bl_scores = [], []
        for img in corpus:
            cfa = mosaic(img, BayerPattern.RGGB)
            ri_scores.append(cpsnr(img, clip_to_range(demosaic_ri(cfa), 0, 255)))
            bl_scores.append(cpsnr(img, clip_to_range(demosaic_bilinear(cfa), 0, 255)))
        assert np.mean(ri_scores) >= np.mean(bl_scores)

    def test_lower_error_than_ha_at_tiny_noise(self, corpus):
        # the residual-interpolation refinement should beat the plain
        # directional method once demosaicking error dominates
        from mosaiclab import NoiseSpec, demosaicked_noise, noise_field_rmse
        ha, ri = [], []
        for k, img in enumerate(corpus):
            spec = NoiseSpec(1.0, 555 + k)
            ha.append(noise_field_rmse(demosaicked_noise(
                img, BayerPattern.RGGB, spec, DemosaickerId.HAMILTON_ADAMS)))
            ri.append(noise_field_rmse(demosaicked_noise(
                img, BayerPattern.RGGB, spec, DemosaickerId.RESIDUAL)))
        assert np.mean(ri) < np.mean(ha)

    def test_rejects_small_input(self):
        with pytest.raises(ValueError):
            demosaic_ri(constant_cfa(1.0, 6, 6))


class TestSharedInvariants:
    @pytest.mark.parametrize("method", ALL_METHODS)
    @pytest.mark.parametrize("pattern", list(BayerPattern))
    def test_interpolating_property(self, rng, method, pattern):
        cfa = CfaImage(rng.uniform(0, 255, (12, 12)), pattern)
        out = demosaic(cfa, method)
        back = mosaic(out, pattern)
        assert np.array_equal(back.samples, cfa.samples)

    @pytest.mark.parametrize("method", ALL_METHODS)
    def test_grey_constant_input_stays_grey(self, method):
        out = demosaic(constant_cfa(77.0, 12, 12), method)
        assert np.abs(out.planes - 77.0).max() < 1e-9

    def test_grey_affine_input_stays_grey_interior(self):
        img = affine_image(12, 12)
        cfa = mosaic(img, BayerPattern.RGGB)
        interior = np.s_[:, 3:-3, 3:-3]
        bl = demosaic_bilinear(cfa)
        assert np.array_equal(bl.planes[interior], img.planes[interior])
        ha = demosaic_ha(cfa)
        assert np.abs(ha.planes[interior] - img.planes[interior]).max() < 1e-9

    @pytest.mark.parametrize("method", ALL_METHODS)
    def test_translation_equivariance_by_two(self, rng, method):
        big = CfaImage(rng.uniform(0, 255, (24, 24)), BayerPattern.RGGB)
        small = CfaImage(big.samples[2:, 2:].copy(), BayerPattern.RGGB)
        out_big = demosaic(big, method)
        out_small = demosaic(small, method)
        m = 8  # stay clear of both borders' influence zones
        a = out_big.planes[:, 2 + m:24 - m, 2 + m:24 - m]
        b = out_small.planes[:, m:22 - m, m:22 - m]
        assert np.allclose(a, b, atol=1e-9)

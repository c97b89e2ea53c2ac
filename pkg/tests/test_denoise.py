import numpy as np
import pytest

from mosaiclab import (BayerPattern, CfaImage, DenoiserConfig, DenoiserId,
                       NoiseSpec, PlanarImage, add_awgn, denoise,
                       denoise_cfa_fourphase, denoise_cfa_halfsize,
                       denoise_dct_yuv, denoise_nlm_y, mosaic)
from mosaiclab.denoise import _dct_matrix, denoise_plane

from synthimg import natural_image

BOTH = [DenoiserId.NLM_Y, DenoiserId.DCT_YUV]


def cfg(kind, sigma):
    return DenoiserConfig(kind=kind, sigma=sigma)


def rmse_to(a, b):
    return float(np.sqrt(np.mean((a - b) ** 2)))


class TestColorDenoisers:
    @pytest.mark.parametrize("kind", BOTH)
    def test_sigma_zero_is_exact_identity(self, rng, kind):
        img = PlanarImage(rng.uniform(0, 255, (3, 32, 32)))
        out = denoise(img, cfg(kind, 0.0))
        assert np.array_equal(out.planes, img.planes)

    @pytest.mark.parametrize("kind", BOTH)
    def test_constant_image_unchanged(self, kind):
        img = PlanarImage(np.full((3, 32, 32), 90.0))
        out = denoise(img, cfg(kind, 15.0))
        assert np.allclose(out.planes, 90.0, atol=1e-9)

    @pytest.mark.parametrize("kind", BOTH)
    def test_grey_input_stays_grey(self, rng, kind):
        plane = rng.uniform(20, 235, (48, 48))
        img = PlanarImage(np.stack([plane, plane, plane]))
        noisy = add_awgn(img, NoiseSpec(10.0, 5))
        grey_noise = PlanarImage(np.broadcast_to(noisy.planes.mean(axis=0), (3, 48, 48)).copy())
        out = denoise(grey_noise, cfg(kind, 10.0))
        assert np.abs(out.planes[0] - out.planes[1]).max() < 1e-9
        assert np.abs(out.planes[0] - out.planes[2]).max() < 1e-9

    @pytest.mark.parametrize("kind", BOTH)
    def test_removes_noise_energy_on_pure_noise(self, kind):
        noisy = add_awgn(PlanarImage(np.full((3, 64, 64), 128.0)), NoiseSpec(20.0, 11))
        out = denoise(noisy, cfg(kind, 20.0))
        assert out.planes.var() < noisy.planes.var()

    @pytest.mark.parametrize("kind", BOTH)
    def test_deterministic(self, rng, kind):
        img = PlanarImage(rng.uniform(0, 255, (3, 40, 40)))
        a = denoise(img, cfg(kind, 12.0))
        b = denoise(img, cfg(kind, 12.0))
        assert np.array_equal(a.planes, b.planes)

    def test_kind_mismatch_rejected(self, rng):
        img = PlanarImage(rng.uniform(0, 255, (3, 16, 16)))
        with pytest.raises(ValueError):
            denoise_nlm_y(img, cfg(DenoiserId.DCT_YUV, 5.0))
        with pytest.raises(ValueError):
            denoise_dct_yuv(img, cfg(DenoiserId.NLM_Y, 5.0))


class TestNlm:
    def test_flat_region_residual_small(self):
        truth = PlanarImage(np.full((3, 64, 64), 128.0))
        noisy = add_awgn(truth, NoiseSpec(20.0, 3))
        out = denoise_nlm_y(noisy, cfg(DenoiserId.NLM_Y, 20.0))
        residual = out.planes - truth.planes
        assert residual.std() < 6.0


class TestDct:
    def test_transform_matrix_is_orthonormal(self):
        d = _dct_matrix(8)
        assert np.allclose(d @ d.T, np.eye(8), atol=1e-12)

    def test_block_round_trip(self, rng):
        d = _dct_matrix(8)
        block = rng.uniform(0, 255, (8, 8))
        back = d.T @ (d @ block @ d.T) @ d
        assert np.abs(back - block).max() < 1e-10

    def test_pure_noise_mostly_removed(self):
        noisy = add_awgn(PlanarImage(np.zeros((3, 128, 128))), NoiseSpec(20.0, 8))
        out = denoise_dct_yuv(noisy, cfg(DenoiserId.DCT_YUV, 20.0))
        assert out.planes.var() < 40.0


def green_phase_gap(residual: np.ndarray, pattern: BayerPattern) -> float:
    """Checkerboard statistic: residual-mean disagreement of the two green
    phases.  A 2x2-periodic artifact appears when the same color channel is
    denoised inconsistently across its two phases."""
    _, g1, g2, _ = pattern.site_offsets()
    m1 = residual[g1[0]::2, g1[1]::2].mean()
    m2 = residual[g2[0]::2, g2[1]::2].mean()
    return abs(float(m1 - m2))


class TestCfaAdapters:
    @pytest.mark.parametrize("adapter", [denoise_cfa_halfsize, denoise_cfa_fourphase])
    @pytest.mark.parametrize("kind", BOTH)
    def test_sigma_zero_is_exact_identity(self, rng, adapter, kind):
        cfa = CfaImage(rng.uniform(0, 255, (32, 32)), BayerPattern.RGGB)
        out = adapter(cfa, cfg(kind, 0.0))
        assert np.array_equal(out.samples, cfa.samples)

    @pytest.mark.parametrize("adapter", [denoise_cfa_halfsize, denoise_cfa_fourphase])
    @pytest.mark.parametrize("kind", BOTH)
    def test_constant_mosaic_unchanged(self, adapter, kind):
        cfa = CfaImage(np.full((32, 32), 55.0), BayerPattern.RGGB)
        out = adapter(cfa, cfg(kind, 10.0))
        assert np.allclose(out.samples, 55.0, atol=1e-9)

    @pytest.mark.parametrize("adapter", [denoise_cfa_halfsize, denoise_cfa_fourphase])
    @pytest.mark.parametrize("kind", BOTH)
    def test_reduces_mosaic_rmse(self, adapter, kind):
        clean = mosaic(natural_image(21, 128, 128), BayerPattern.RGGB)
        noisy = add_awgn(clean, NoiseSpec(20.0, 77))
        out = adapter(noisy, cfg(kind, 20.0))
        assert rmse_to(out.samples, clean.samples) < rmse_to(noisy.samples, clean.samples)

    @pytest.mark.parametrize("kind", BOTH)
    def test_fourphase_leaves_no_checkerboard(self, kind):
        clean = mosaic(natural_image(21, 128, 128), BayerPattern.RGGB)
        noisy = add_awgn(clean, NoiseSpec(20.0, 78))
        out = denoise_cfa_fourphase(noisy, cfg(kind, 20.0))
        assert green_phase_gap(out.samples - clean.samples, clean.pattern) < 1.0

    @pytest.mark.parametrize("kind", BOTH)
    def test_grayscale_form_sigma_zero_identity(self, rng, kind):
        plane = rng.uniform(0, 255, (24, 24))
        assert np.array_equal(denoise_plane(plane, cfg(kind, 0.0)), plane)

"""Raw camera pipeline laboratory.

Simulates the early single-sensor pipeline (Bayer mosaic, white noise,
demosaicking, denoising) to compare the two orderings of denoising and
demosaicking and to characterize the structure of demosaicked noise.
"""

from .analysis import (ChannelCovMatrix, NoiseField, SpatialCovTable,
                       channel_covariance, cpsnr, demosaicked_noise,
                       noise_field_rmse, rmse, rmse_vs_sigma_table,
                       spatial_covariance)
from .cfa import (HalfSizeQuad, four_phase_views, mosaic, rearrange_half_size,
                  recombine_half_size)
from .demosaic import (DemosaickerId, demosaic, demosaic_bilinear, demosaic_ha,
                       demosaic_ri)
from .denoise import (DenoiserConfig, DenoiserId, denoise, denoise_cfa_fourphase,
                      denoise_cfa_halfsize, denoise_dct_yuv, denoise_nlm_y)
from .imagecore import (RGB, YUV_ISO, BayerPattern, CfaImage, PlanarImage,
                        clip_to_range, rgb_to_yuv_iso, yuv_to_rgb_iso)
from .noisegen import NoiseSpec, add_awgn, derive_seed, vst_forward, vst_inverse
from .schemes import (CfaAdapter, PipelineOrder, SchemeConfig, SweepResult,
                      run_scheme, sweep_factor)

__version__ = "0.1.0"

__all__ = [
    "BayerPattern", "CfaImage", "PlanarImage", "RGB", "YUV_ISO",
    "rgb_to_yuv_iso", "yuv_to_rgb_iso", "clip_to_range",
    "HalfSizeQuad", "mosaic", "rearrange_half_size", "recombine_half_size",
    "four_phase_views",
    "DemosaickerId", "demosaic", "demosaic_bilinear", "demosaic_ha", "demosaic_ri",
    "NoiseSpec", "add_awgn", "derive_seed", "vst_forward", "vst_inverse",
    "DenoiserConfig", "DenoiserId", "denoise", "denoise_nlm_y", "denoise_dct_yuv",
    "denoise_cfa_halfsize", "denoise_cfa_fourphase",
    "PipelineOrder", "CfaAdapter", "SchemeConfig", "SweepResult",
    "run_scheme", "sweep_factor",
    "NoiseField", "SpatialCovTable", "ChannelCovMatrix",
    "demosaicked_noise", "spatial_covariance", "channel_covariance",
    "cpsnr", "rmse", "noise_field_rmse", "rmse_vs_sigma_table",
]

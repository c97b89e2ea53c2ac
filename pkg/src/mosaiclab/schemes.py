"""Pipeline orderings (denoise-first vs demosaick-first) and the factor sweep."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Sequence

from .analysis import cpsnr
from .cfa import mosaic
from .demosaic import DemosaickerId, demosaic
from .denoise import DenoiserConfig, denoise, denoise_cfa_fourphase, denoise_cfa_halfsize
from .imagecore import BayerPattern, PlanarImage, clip_to_range
from .noisegen import NoiseSpec, add_awgn, derive_seed


class PipelineOrder(Enum):
    DN_THEN_DM = "dn-dm"
    DM_THEN_DN = "dm-dn"


class CfaAdapter(Enum):
    HALFSIZE = "halfsize"
    FOURPHASE = "fourphase"


@dataclass(frozen=True)
class SchemeConfig:
    """Complete description of one restoration pipeline run.

    In the denoise-first order the raw-domain denoiser always receives
    sigma0 itself (the mosaic noise is white); in the demosaick-first order
    the color denoiser receives factor_c * sigma0.
    """

    order: PipelineOrder
    demosaicker: DemosaickerId
    denoiser: DenoiserConfig
    sigma0: float
    factor_c: float = 1.0
    cfa_adapter: CfaAdapter = CfaAdapter.HALFSIZE
    seed: int = 0
    pattern: BayerPattern = BayerPattern.RGGB

    def __post_init__(self):
        if self.sigma0 < 0:
            raise ValueError(f"sigma0 must be >= 0, got {self.sigma0}")
        if self.factor_c <= 0:
            raise ValueError(f"factor_c must be > 0, got {self.factor_c}")


@dataclass(frozen=True)
class SweepResult:
    """One row per factor: the factor, corpus-mean CPSNR, per-image CPSNRs."""

    factors: tuple[float, ...]
    mean_cpsnr: tuple[float, ...]
    per_image: tuple[tuple[float, ...], ...] = field(repr=False)

    def argmax_factor(self) -> float:
        best = max(range(len(self.factors)), key=lambda i: self.mean_cpsnr[i])
        return self.factors[best]


def run_scheme(ground_truth: PlanarImage, cfg: SchemeConfig) -> tuple[PlanarImage, float]:
    """Mosaic, add noise, restore with the configured ordering, and score.

    Returns the restored image (clipped to [0, 255]) and its CPSNR against
    the ground truth.
    """
    raw = mosaic(ground_truth, cfg.pattern)
    noisy = add_awgn(raw, NoiseSpec(cfg.sigma0, cfg.seed))
    if cfg.order is PipelineOrder.DN_THEN_DM:
        dn_cfg = replace(cfg.denoiser, sigma=cfg.sigma0)
        if cfg.cfa_adapter is CfaAdapter.HALFSIZE:
            cleaned = denoise_cfa_halfsize(noisy, dn_cfg)
        else:
            cleaned = denoise_cfa_fourphase(noisy, dn_cfg)
        restored = demosaic(cleaned, cfg.demosaicker)
    else:
        demosaicked = demosaic(noisy, cfg.demosaicker)
        dn_cfg = replace(cfg.denoiser, sigma=cfg.factor_c * cfg.sigma0)
        restored = denoise(demosaicked, dn_cfg)
    restored = clip_to_range(restored, 0.0, 255.0)
    return restored, cpsnr(ground_truth, restored)


def _sweep_one_image(img: PlanarImage, base: SchemeConfig, factors: Sequence[float],
                     seed: int) -> list[float]:
    # The noisy mosaic and the demosaicked image are shared by every factor,
    # so all rows see a bit-identical noise realization.
    raw = mosaic(img, base.pattern)
    noisy = add_awgn(raw, NoiseSpec(base.sigma0, seed))
    demosaicked = demosaic(noisy, base.demosaicker)
    scores = []
    for c in factors:
        dn_cfg = replace(base.denoiser, sigma=c * base.sigma0)
        restored = clip_to_range(denoise(demosaicked, dn_cfg), 0.0, 255.0)
        scores.append(cpsnr(img, restored))
    return scores


def sweep_factor(corpus: Sequence[PlanarImage], base: SchemeConfig,
                 factors: Sequence[float], threads: int = 1) -> SweepResult:
    """Demosaick-first restoration swept over denoiser factors.

    Image k uses the sub-seed derive_seed(base.seed, k), fixed across
    factors.  Corpus items may be processed in parallel; per-image results
    are pure functions of the inputs, so the result is identical for any
    thread count.
    """
    if not corpus:
        raise ValueError("empty corpus")
    if not factors:
        raise ValueError("empty factor list")
    factors = tuple(float(c) for c in factors)
    if any(b <= a for a, b in zip(factors, factors[1:])):
        raise ValueError("factors must be strictly increasing")
    if base.order is not PipelineOrder.DM_THEN_DN:
        raise ValueError("factor sweeps apply to the demosaick-first order")

    seeds = [derive_seed(base.seed, k) for k in range(len(corpus))]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_image = list(pool.map(
                lambda args: _sweep_one_image(args[0], base, factors, args[1]),
                zip(corpus, seeds),
            ))
    else:
        per_image = [_sweep_one_image(img, base, factors, s)
                     for img, s in zip(corpus, seeds)]

    rows = tuple(tuple(scores[i] for scores in per_image) for i in range(len(factors)))
    means = tuple(sum(row) / len(row) for row in rows)
    return SweepResult(factors=factors, mean_cpsnr=means, per_image=rows)

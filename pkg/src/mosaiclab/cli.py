"""Command-line front end: mosaic simulation, restoration runs, and reports.

Every report CSV starts with comment lines echoing the full configuration
(flags and seed); re-running the echoed configuration reproduces every
numeric cell exactly.  All numbers use dot-decimal repr formatting,
independent of locale, and per-image rows are sorted by filename.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import datasets, pnm
from .analysis import channel_covariance, demosaicked_noise, spatial_covariance
from .cfa import mosaic
from .demosaic import DemosaickerId, demosaic
from .denoise import DenoiserConfig, DenoiserId, denoise
from .imagecore import BayerPattern, clip_to_range
from .noisegen import NoiseSpec, add_awgn, derive_seed
from .schemes import CfaAdapter, PipelineOrder, SchemeConfig, run_scheme, sweep_factor

_PATTERNS = [p.value for p in BayerPattern]
_DEMOSAICKERS = [d.value for d in DemosaickerId]
_DENOISERS = [d.value for d in DenoiserId]


def _parse_factors(text: str) -> list[float]:
    """Parse "a:b:step" into the inclusive ascending factor list."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"factors must be a:b:step, got {text!r}")
    a, b, step = (float(p) for p in parts)
    if step <= 0 or b < a:
        raise ValueError(f"bad factor range {text!r}")
    out = []
    k = 0
    while True:
        c = a + k * step
        if c > b + 1e-9:
            break
        out.append(round(c, 12))
        k += 1
    return out


def _sorted_inputs(paths: list[str]) -> list[Path]:
    # Filename order fixes both the report row order and the per-image
    # sub-seed assignment, so argument order never changes a result.
    return sorted((Path(p) for p in paths), key=lambda p: (p.name, str(p)))


def _echo_lines(command: str, args: argparse.Namespace, inputs: list[Path]) -> list[str]:
    # report destinations are not part of the experiment configuration
    skip = {"func", "inputs", "command",
            "csv", "channel_csv", "cloud_csv", "save_dir", "out"}
    lines = [f"# command={command}"]
    for key in sorted(vars(args)):
        if key in skip:
            continue
        value = getattr(args, key)
        if value is None:
            continue
        lines.append(f"# {key.replace('_', '-')}={value}")
    for p in inputs:
        lines.append(f"# input={p}")
    return lines


def _write_report(path: str | None, lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_any(path: Path, pattern: BayerPattern):
    with open(path, "rb") as f:
        magic = f.read(2)
    if magic == b"P5":
        return pnm.load_cfa(path, pattern)
    return pnm.load_image(path)


def _denoiser_config(args: argparse.Namespace, sigma: float) -> DenoiserConfig:
    return DenoiserConfig(
        kind=DenoiserId(args.dn),
        sigma=sigma,
        patch_radius=args.patch_radius,
        search_radius=args.search_radius,
        block_size=args.block_size,
    )


def cmd_mosaic(args) -> int:
    img = pnm.load_image(args.inputs[0])
    raw = mosaic(img, BayerPattern(args.pattern))
    pnm.save_image(raw, args.out, depth=args.depth)
    return 0


def cmd_add_noise(args) -> int:
    src = _load_any(Path(args.inputs[0]), BayerPattern(args.pattern))
    noisy = add_awgn(src, NoiseSpec(args.sigma, args.seed))
    pnm.save_image(noisy, args.out, depth=args.depth)
    return 0


def cmd_demosaic(args) -> int:
    raw = pnm.load_cfa(args.inputs[0], BayerPattern(args.pattern))
    img = demosaic(raw, DemosaickerId(args.dm))
    pnm.save_image(clip_to_range(img, 0.0, 255.0), args.out, depth=args.depth)
    return 0


def cmd_denoise(args) -> int:
    img = pnm.load_image(args.inputs[0])
    out = denoise(img, _denoiser_config(args, args.sigma))
    pnm.save_image(clip_to_range(out, 0.0, 255.0), args.out, depth=args.depth)
    return 0


def cmd_pipeline(args) -> int:
    inputs = _sorted_inputs(args.inputs)
    base = SchemeConfig(
        order=PipelineOrder(args.order),
        demosaicker=DemosaickerId(args.dm),
        denoiser=_denoiser_config(args, args.sigma),
        sigma0=args.sigma,
        factor_c=args.factor,
        cfa_adapter=CfaAdapter(args.adapter),
        seed=args.seed,
        pattern=BayerPattern(args.pattern),
    )

    def one(item):
        index, path = item
        img = pnm.load_image(path)
        cfg = replace(base, seed=derive_seed(args.seed, index))
        restored, score = run_scheme(img, cfg)
        if args.save_dir:
            out_dir = Path(args.save_dir)
            out_dir.mkdir(parents=True, exist_ok=True)
            pnm.save_image(restored, out_dir / path.name, depth=args.depth)
        return score

    items = list(enumerate(inputs))
    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            scores = list(pool.map(one, items))
    else:
        scores = [one(it) for it in items]

    lines = _echo_lines("pipeline", args, inputs)
    lines.append("file,cpsnr")
    for path, score in zip(inputs, scores):
        lines.append(f"{path.name},{score!r}")
    lines.append(f"mean,{sum(scores) / len(scores)!r}")
    _write_report(args.csv, lines)
    return 0


def cmd_sweep(args) -> int:
    factors = _parse_factors(args.factors)
    inputs = _sorted_inputs(args.inputs)
    base = SchemeConfig(
        order=PipelineOrder.DM_THEN_DN,
        demosaicker=DemosaickerId(args.dm),
        denoiser=_denoiser_config(args, args.sigma),
        sigma0=args.sigma,
        seed=args.seed,
        pattern=BayerPattern(args.pattern),
    )
    corpus = [pnm.load_image(p) for p in inputs]
    result = sweep_factor(corpus, base, factors, threads=args.threads)

    lines = _echo_lines("sweep", args, inputs)
    lines.append("factor,mean_cpsnr," + ",".join(p.name for p in inputs))
    for i, factor in enumerate(result.factors):
        row = ",".join(repr(v) for v in result.per_image[i])
        lines.append(f"{factor!r},{result.mean_cpsnr[i]!r},{row}")
    _write_report(args.csv, lines)
    return 0


def cmd_noise_stats(args) -> int:
    inputs = _sorted_inputs(args.inputs)
    img = pnm.load_image(inputs[0])
    nf = demosaicked_noise(img, BayerPattern(args.pattern),
                           NoiseSpec(args.sigma, args.seed), DemosaickerId(args.dm))
    table = spatial_covariance(nf, space=args.space.upper())
    lines = _echo_lines("noise-stats", args, inputs)
    lines.extend(table.to_csv().rstrip("\n").split("\n"))
    _write_report(args.csv, lines)
    if args.channel_csv:
        _write_report(args.channel_csv, channel_covariance(nf).to_csv().rstrip("\n").split("\n"))
    if args.cloud_csv:
        flat = nf.planes.reshape(3, -1)
        cloud = ["r,g,b"] + [f"{float(r)!r},{float(g)!r},{float(b)!r}"
                             for r, g, b in flat.T]
        _write_report(args.cloud_csv, cloud)
    return 0


def cmd_fetch(args) -> int:
    dest = args.dest or datasets.default_data_dir() / args.dataset
    manifest = datasets.fetch_dataset(args.dataset, dest, base_url=args.base_url)
    sys.stdout.write(f"{len(manifest.files)} files verified in {dest}\n")
    return 0


def _add_common_image_flags(p: argparse.ArgumentParser, n_inputs: str) -> None:
    p.add_argument("inputs", nargs=n_inputs, metavar="IMAGE",
                   help="input pixmap(s): P6 color, P5 mosaic")
    p.add_argument("--pattern", choices=_PATTERNS, default="rggb",
                   help="Bayer phase of the mosaic (default rggb)")
    p.add_argument("--depth", type=int, choices=(8, 16), default=8,
                   help="output bit depth (default 8)")


def _add_denoiser_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dn", choices=_DENOISERS, required=True, help="denoiser")
    p.add_argument("--patch-radius", type=int, default=3, help="patch radius (nlm)")
    p.add_argument("--search-radius", type=int, default=10, help="search radius (nlm)")
    p.add_argument("--block-size", type=int, default=8, help="transform block size (dct)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mosaiclab",
        description="Raw camera pipeline lab: mosaic, noise, demosaick, denoise, compare.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mosaic", help="sample a color image onto a Bayer mosaic")
    _add_common_image_flags(p, 1)
    p.add_argument("--out", required=True, help="output graymap path")
    p.set_defaults(func=cmd_mosaic)

    p = sub.add_parser("add-noise", help="add white Gaussian noise")
    _add_common_image_flags(p, 1)
    p.add_argument("--sigma", type=float, required=True, help="noise level, 8-bit units")
    p.add_argument("--seed", type=int, default=0, help="noise seed (default 0)")
    p.add_argument("--out", required=True, help="output path")
    p.set_defaults(func=cmd_add_noise)

    p = sub.add_parser("demosaic", help="interpolate a mosaic to full color")
    _add_common_image_flags(p, 1)
    p.add_argument("--dm", choices=_DEMOSAICKERS, required=True, help="demosaicker")
    p.add_argument("--out", required=True, help="output pixmap path")
    p.set_defaults(func=cmd_demosaic)

    p = sub.add_parser("denoise", help="denoise a color image")
    _add_common_image_flags(p, 1)
    _add_denoiser_flags(p)
    p.add_argument("--sigma", type=float, required=True, help="denoiser noise parameter")
    p.add_argument("--out", required=True, help="output pixmap path")
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser(
        "pipeline",
        help="full restoration run; CSV columns: file,cpsnr then a mean row",
    )
    _add_common_image_flags(p, "+")
    _add_denoiser_flags(p)
    p.add_argument("--order", choices=[o.value for o in PipelineOrder], required=True,
                   help="dn-dm: denoise the mosaic first; dm-dn: demosaick first")
    p.add_argument("--dm", choices=_DEMOSAICKERS, required=True, help="demosaicker")
    p.add_argument("--sigma", type=float, required=True, help="mosaic noise level sigma0")
    p.add_argument("--seed", type=int, default=0, help="base noise seed (default 0)")
    p.add_argument("--factor", type=float, default=1.0,
                   help="denoiser parameter multiplier for dm-dn (default 1.0)")
    p.add_argument("--adapter", choices=[a.value for a in CfaAdapter], default="halfsize",
                   help="mosaic-domain denoising adapter for dn-dm (default halfsize)")
    p.add_argument("--save-dir", help="also write restored images here")
    p.add_argument("--threads", type=int, default=1, help="corpus-parallel workers")
    p.add_argument("--csv", help="report path (default stdout)")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser(
        "sweep",
        help="demosaick-first factor sweep; CSV columns: factor,mean_cpsnr,<one per file>",
    )
    _add_common_image_flags(p, "+")
    _add_denoiser_flags(p)
    p.add_argument("--dm", choices=_DEMOSAICKERS, required=True, help="demosaicker")
    p.add_argument("--sigma", type=float, required=True, help="mosaic noise level sigma0")
    p.add_argument("--seed", type=int, default=0, help="base noise seed (default 0)")
    p.add_argument("--factors", required=True, help="factor range a:b:step, inclusive")
    p.add_argument("--threads", type=int, default=1, help="corpus-parallel workers")
    p.add_argument("--csv", help="report path (default stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser(
        "noise-stats",
        help="demosaicked-noise covariance table; CSV columns: channel,statistic,(s,t)...",
    )
    _add_common_image_flags(p, 1)
    p.add_argument("--dm", choices=_DEMOSAICKERS, required=True, help="demosaicker")
    p.add_argument("--sigma", type=float, required=True, help="mosaic noise level sigma0")
    p.add_argument("--seed", type=int, default=0, help="noise seed (default 0)")
    p.add_argument("--space", choices=("rgb", "yuv"), default="rgb",
                   help="statistics frame (default rgb)")
    p.add_argument("--csv", help="report path (default stdout)")
    p.add_argument("--channel-csv", help="also write the 3x3 channel covariance here")
    p.add_argument("--cloud-csv", help="also write the raw noise point cloud here")
    p.set_defaults(func=cmd_noise_stats)

    p = sub.add_parser("fetch", help="download and verify a benchmark dataset")
    p.add_argument("--dataset", choices=(datasets.KODAK,), default=datasets.KODAK)
    p.add_argument("--dest", help=f"target directory (default under ${datasets.DATA_DIR_ENV})")
    p.add_argument("--base-url", help="alternate mirror URL")
    p.set_defaults(func=cmd_fetch)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # single-line diagnostic, nonzero exit
        print(f"mosaiclab: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

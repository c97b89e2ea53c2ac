"""Binary portable pixmap (P6) and graymap (P5) reading and writing.

These are the canonical on-disk formats: bit-exactly specifiable,
dependency-free, and wide enough (16-bit) for the float cores.  8-bit files
hold codes 0..255 equal to the nominal intensity; 16-bit files hold codes
0..65535 with value = code / 257, so integer intensities round-trip exactly.
Quantization happens only here, never inside the pipeline.
"""
from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from .imagecore import RGB, BayerPattern, CfaImage, PlanarImage

_MAX_SIDE = 1 << 20
_SCALE16 = 257.0  # 65535 / 255


class PnmError(ValueError):
    """Malformed or unsupported portable-pixmap data."""


def _read_token(f: io.BufferedIOBase) -> bytes:
    tok = b""
    while True:
        ch = f.read(1)
        if not ch:
            raise PnmError("unexpected end of header")
        if ch == b"#":  # comment runs to end of line
            while ch not in (b"\n", b"\r", b""):
                ch = f.read(1)
            continue
        if ch.isspace():
            if tok:
                return tok
            continue
        tok += ch


def _parse_header(f: io.BufferedIOBase) -> tuple[bytes, int, int, int]:
    magic = f.read(2)
    if magic not in (b"P5", b"P6"):
        raise PnmError(f"unknown magic {magic!r}, expected P5 or P6")
    fields = []
    for name in ("width", "height", "maxval"):
        tok = _read_token(f)
        try:
            value = int(tok)
        except ValueError:
            raise PnmError(f"non-numeric {name} field {tok!r}") from None
        fields.append(value)
    width, height, maxval = fields
    if width <= 0 or height <= 0 or width > _MAX_SIDE or height > _MAX_SIDE:
        raise PnmError(f"dimensions {width}x{height} out of range")
    if not 0 < maxval < 65536:
        raise PnmError(f"maxval {maxval} out of range (must be 1..65535)")
    return magic, width, height, maxval


def _read_raster(f: io.BufferedIOBase, width: int, height: int, maxval: int,
                 channels: int) -> np.ndarray:
    itemsize = 2 if maxval > 255 else 1
    need = width * height * channels * itemsize
    payload = f.read(need)
    if len(payload) < need:
        raise PnmError(f"truncated payload: expected {need} bytes, got {len(payload)}")
    dtype = ">u2" if itemsize == 2 else np.uint8
    codes = np.frombuffer(payload, dtype=dtype).astype(np.float64)
    values = codes * (255.0 / maxval)
    if channels == 1:
        return values.reshape(height, width)
    return values.reshape(height, width, channels).transpose(2, 0, 1)


def _quantize(values: np.ndarray, maxval: int) -> np.ndarray:
    codes = np.rint(np.clip(values, 0.0, 255.0) * (maxval / 255.0))
    return codes.astype(">u2" if maxval > 255 else np.uint8)


def load_image(path) -> PlanarImage:
    """Read a binary color pixmap (P6) as a full-resolution image."""
    with open(path, "rb") as f:
        magic, width, height, maxval = _parse_header(f)
        if magic != b"P6":
            raise PnmError(f"{path} is not a color pixmap (P6)")
        planes = _read_raster(f, width, height, maxval, channels=3)
    return PlanarImage(planes, RGB)


def load_cfa(path, pattern: BayerPattern) -> CfaImage:
    """Read a binary graymap (P5) as a mosaic with the given Bayer pattern."""
    with open(path, "rb") as f:
        magic, width, height, maxval = _parse_header(f)
        if magic != b"P5":
            raise PnmError(f"{path} is not a graymap (P5)")
        samples = _read_raster(f, width, height, maxval, channels=1)
    return CfaImage(samples, pattern)


def save_image(img: PlanarImage | CfaImage, path, depth: int = 8) -> None:
    """Write an image (P6) or mosaic (P5), quantized to 8 or 16 bits."""
    if depth not in (8, 16):
        raise PnmError(f"unsupported depth {depth}, use 8 or 16")
    maxval = 255 if depth == 8 else 65535
    if isinstance(img, PlanarImage):
        magic, h, w = b"P6", img.height, img.width
        raster = _quantize(img.planes.transpose(1, 2, 0), maxval)
    elif isinstance(img, CfaImage):
        magic, h, w = b"P5", img.height, img.width
        raster = _quantize(img.samples, maxval)
    else:
        raise TypeError(f"cannot save {type(img).__name__}")
    header = magic + b"\n%d %d\n%d\n" % (w, h, maxval)
    Path(path).write_bytes(header + raster.tobytes())

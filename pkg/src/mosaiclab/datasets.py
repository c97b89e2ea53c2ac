"""Benchmark dataset download, conversion to pixmaps, and manifest checking."""
from __future__ import annotations

import hashlib
import io
import json
import os
import urllib.request
from dataclasses import dataclass
from pathlib import Path

from . import pnm
from .imagecore import PlanarImage

KODAK = "kodak"
KODAK_BASE_URL = "http://r0k.us/graphics/kodak/kodak/"
KODAK_FILES = tuple(f"kodim{i:02d}.png" for i in range(1, 26))
DATA_DIR_ENV = "MOSAICLAB_DATA_DIR"
MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class DatasetManifest:
    name: str
    source_url: str
    files: tuple[str, ...]
    checksums: tuple[str, ...]

    def to_json(self) -> str:
        return json.dumps(
            {
                "name": self.name,
                "source_url": self.source_url,
                "files": [{"file": f, "sha256": c}
                          for f, c in zip(self.files, self.checksums)],
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "DatasetManifest":
        doc = json.loads(text)
        return cls(
            name=doc["name"],
            source_url=doc["source_url"],
            files=tuple(e["file"] for e in doc["files"]),
            checksums=tuple(e["sha256"] for e in doc["files"]),
        )


def default_data_dir() -> Path:
    override = os.environ.get(DATA_DIR_ENV)
    if override:
        return Path(override)
    return Path.home() / ".cache" / "mosaiclab"


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _png_bytes_to_ppm(data: bytes, dest: Path) -> None:
    from PIL import Image  # heavyweight import kept local to the fetch path

    with Image.open(io.BytesIO(data)) as im:
        rgb = im.convert("RGB")
        import numpy as np

        arr = np.asarray(rgb, dtype=np.float64).transpose(2, 0, 1)
    pnm.save_image(PlanarImage(arr), dest, depth=8)


def fetch_dataset(name: str, dest_dir, base_url: str | None = None,
                  timeout: float = 60.0) -> DatasetManifest:
    """Download a benchmark set, convert to pixmaps, and write a checksummed manifest.

    Idempotent: files whose checksum already matches the manifest are kept.
    A file that is missing or corrupted on disk is downloaded again and its
    checksum re-verified.  Any failure leaves no partially updated manifest.
    """
    if name.lower() != KODAK:
        raise ValueError(f"unknown dataset {name!r}")
    base = (base_url or KODAK_BASE_URL).rstrip("/") + "/"
    dest = Path(dest_dir)
    dest.mkdir(parents=True, exist_ok=True)
    manifest_path = dest / MANIFEST_NAME

    previous: dict[str, str] = {}
    if manifest_path.exists():
        old = DatasetManifest.from_json(manifest_path.read_text())
        previous = dict(zip(old.files, old.checksums))

    files = []
    checksums = []
    for png_name in KODAK_FILES:
        ppm_name = png_name.rsplit(".", 1)[0] + ".ppm"
        target = dest / ppm_name
        expected = previous.get(ppm_name)
        if target.exists() and expected is not None and _sha256(target) == expected:
            files.append(ppm_name)
            checksums.append(expected)
            continue
        with urllib.request.urlopen(base + png_name, timeout=timeout) as resp:
            data = resp.read()
        _png_bytes_to_ppm(data, target)
        digest = _sha256(target)
        if expected is not None and digest != expected:
            raise IOError(
                f"checksum mismatch for {ppm_name}: manifest {expected}, got {digest}")
        files.append(ppm_name)
        checksums.append(digest)

    manifest = DatasetManifest(KODAK, base, tuple(files), tuple(checksums))
    tmp = manifest_path.with_suffix(".tmp")
    tmp.write_text(manifest.to_json())
    os.replace(tmp, manifest_path)
    return manifest

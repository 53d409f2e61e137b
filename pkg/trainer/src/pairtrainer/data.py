"""Pair sources. The trainer consumes the augmentation engine only through
its public surfaces: the manifest.json dataset schema (schema_version 1,
PNG files on disk) and the HTTP service's /fresh and /sample endpoints
(zip of PNGs with an optional palette.json).

Combined primitives stack one-hot segmentation channels first and the
binary edge channel last.
"""

from __future__ import annotations

import io
import json
import urllib.request
import zipfile
from pathlib import Path

import numpy as np
from PIL import Image


class SourceUnreachable(Exception):
    pass


def _png_to_float(im: Image.Image) -> np.ndarray:
    if im.mode not in ("L", "RGB"):
        im = im.convert("RGB" if len(im.getbands()) >= 3 else "L")
    arr = np.asarray(im, dtype=np.float32) / 255.0
    return arr[:, :, None] if arr.ndim == 2 else arr


def _edge_channel(im: Image.Image) -> np.ndarray:
    arr = np.asarray(im.convert("L"), dtype=np.float32)
    return (arr > 127).astype(np.float32)[:, :, None]


def _one_hot(labels: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros((*labels.shape, n), dtype=np.float32)
    rows, cols = np.mgrid[0 : labels.shape[0], 0 : labels.shape[1]]
    out[rows, cols, labels] = 1.0
    return out


def primitive_from_files(entry: dict, base_dir: Path) -> np.ndarray:
    """Assemble the conditioning tensor from a manifest primitive entry."""
    base_dir = Path(base_dir)
    parts = []
    if "segmentation" in entry:
        with Image.open(base_dir / entry["segmentation"]) as im:
            labels = np.asarray(im, dtype=np.int64)
        pal = json.loads((base_dir / entry["palette"]).read_text())
        parts.append(_one_hot(labels, len(pal["labels"])))
    if "edge" in entry:
        with Image.open(base_dir / entry["edge"]) as im:
            parts.append(_edge_channel(im))
    if not parts:
        raise ValueError(f"primitive entry has no files: {entry}")
    return np.concatenate(parts, axis=2)


class ManifestSource:
    """Cycles deterministically through a generated dataset directory."""

    def __init__(self, manifest_path):
        path = Path(manifest_path)
        if path.is_dir():
            path = path / "manifest.json"
        if not path.exists():
            raise SourceUnreachable(f"no manifest at {path}")
        self.base_dir = path.parent
        self.doc = json.loads(path.read_text())
        if self.doc.get("schema_version") != 1:
            raise SourceUnreachable(
                f"unsupported manifest schema {self.doc.get('schema_version')}")
        self.samples = self.doc["samples"]

    def __len__(self):
        return len(self.samples)

    def get(self, iteration: int) -> tuple[np.ndarray, np.ndarray]:
        rec = self.samples[iteration % len(self.samples)]
        with Image.open(self.base_dir / rec["image_path"]) as im:
            image = _png_to_float(im)
        prim = primitive_from_files(rec["primitive_files"], self.base_dir)
        return prim, image

    def source_pair(self) -> tuple[np.ndarray, np.ndarray]:
        src = self.doc["source"]
        with Image.open(self.base_dir / src["image"]) as im:
            image = _png_to_float(im)
        prim = primitive_from_files(src["primitive"], self.base_dir)
        return prim, image


class HttpSource:
    """Draws a fresh augmented pair per iteration from the sample service."""

    def __init__(self, base_url: str, timeout: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        try:
            body = urllib.request.urlopen(self.base_url + "/health",
                                          timeout=timeout).read()
        except OSError as e:
            raise SourceUnreachable(f"cannot reach {base_url}: {e}") from e
        if body != b"ok":
            raise SourceUnreachable(f"unexpected health response: {body!r}")

    def get(self, iteration: int) -> tuple[np.ndarray, np.ndarray]:
        url = f"{self.base_url}/fresh?seed={iteration}"
        try:
            data = urllib.request.urlopen(url, timeout=self.timeout).read()
        except OSError as e:
            raise SourceUnreachable(f"fetch failed: {e}") from e
        return pair_from_zip(data)

    def source_pair(self) -> tuple[np.ndarray, np.ndarray]:
        url = f"{self.base_url}/sample?index=0"
        try:
            data = urllib.request.urlopen(url, timeout=self.timeout).read()
        except OSError as e:
            raise SourceUnreachable(f"fetch failed: {e}") from e
        return pair_from_zip(data)


def pair_from_zip(data: bytes) -> tuple[np.ndarray, np.ndarray]:
    with zipfile.ZipFile(io.BytesIO(data)) as zf:
        names = set(zf.namelist())
        with zf.open("image.png") as fh:
            image = _png_to_float(Image.open(fh))
        parts = []
        if "primitive_seg.png" in names:
            with zf.open("primitive_seg.png") as fh:
                labels = np.asarray(Image.open(fh), dtype=np.int64)
            pal = json.loads(zf.read("palette.json").decode())
            parts.append(_one_hot(labels, len(pal["labels"])))
        if "primitive_edge.png" in names:
            with zf.open("primitive_edge.png") as fh:
                parts.append(_edge_channel(Image.open(fh)))
    return np.concatenate(parts, axis=2), image


def open_source(spec: str):
    if spec.startswith("http://") or spec.startswith("https://"):
        return HttpSource(spec)
    return ManifestSource(spec)

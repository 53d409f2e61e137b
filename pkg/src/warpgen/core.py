"""Shared domain types, image I/O, and deterministic randomness.

Images are numpy float32 arrays of shape (H, W, C) with samples in [0, 1].
8-bit quantization happens only at the PNG boundary so that warping and
metrics operate on clean floats.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError


class IoError(Exception):
    pass


class DecodeError(Exception):
    pass


class UnsupportedChannels(Exception):
    pass


class DimensionMismatch(Exception):
    pass


class NonContiguousLabels(Exception):
    pass


def validate_image(img: np.ndarray) -> np.ndarray:
    """Check the (H, W, C) float-in-[0,1] contract; returns the array."""
    if img.ndim != 3:
        raise DimensionMismatch(f"expected (H, W, C) array, got shape {img.shape}")
    if img.size and (img.min() < 0.0 or img.max() > 1.0):
        raise ValueError(f"samples outside [0, 1]: min={img.min()}, max={img.max()}")
    return img


def load_image(path) -> np.ndarray:
    """Load a PNG (or other Pillow-decodable raster) as float32 in [0, 1].

    Grayscale decodes to (H, W, 1), RGB to (H, W, 3). Palette images are
    expanded to RGB; use `load_segmentation` to keep label indices.
    """
    path = Path(path)
    if not path.exists():
        raise IoError(f"no such file: {path}")
    try:
        with Image.open(path) as im:
            if im.mode in ("P", "RGBA"):
                im = im.convert("RGB")
            elif im.mode not in ("L", "RGB"):
                im = im.convert("RGB" if len(im.getbands()) >= 3 else "L")
            arr = np.asarray(im, dtype=np.float32) / 255.0
    except UnidentifiedImageError as e:
        raise DecodeError(f"cannot decode {path}: {e}") from e
    except OSError as e:
        raise IoError(f"cannot read {path}: {e}") from e
    if arr.ndim == 2:
        arr = arr[:, :, None]
    return arr


def save_image(img: np.ndarray, path) -> None:
    """Write a float [0,1] image as 8-bit PNG. Channels must be 1 or 3."""
    validate_image(img)
    if img.shape[2] not in (1, 3):
        raise UnsupportedChannels(f"cannot encode {img.shape[2]} channels as PNG")
    path = Path(path)
    if not path.parent.exists():
        raise IoError(f"parent directory missing: {path.parent}")
    quant = np.clip(np.rint(img * 255.0), 0, 255).astype(np.uint8)
    if quant.shape[2] == 1:
        pil = Image.fromarray(quant[:, :, 0], mode="L")
    else:
        pil = Image.fromarray(quant, mode="RGB")
    try:
        pil.save(path, format="PNG")
    except OSError as e:
        raise IoError(f"cannot write {path}: {e}") from e


@dataclass(frozen=True)
class SeedSpec:
    """Root of all randomness. Every derived stream is determined by
    (master_seed, stream_id, index) alone."""

    master_seed: int
    stream_id: int = 0


def derive_stream(seed: SeedSpec, index: int) -> np.random.Generator:
    """Deterministic, platform-independent random stream for one sample.

    Uses the counter-based Philox generator keyed through a SeedSequence
    with spawn_key (stream_id, index); identical inputs give identical
    draw sequences on any platform and numpy >= 1.17.
    """
    ss = np.random.SeedSequence(entropy=seed.master_seed,
                                spawn_key=(seed.stream_id, index))
    return np.random.Generator(np.random.Philox(ss))


class PrimitiveKind(Enum):
    EDGE = "edge"
    SEGMENTATION = "segmentation"
    COMBINED = "combined"


@dataclass
class PrimitiveTensor:
    """Conditioning representation: binary edges, one-hot labels, or both.

    Combined stacks the one-hot label channels first and the binary edge
    channel last; that ordering is a published convention relied on by the
    trainer and the editor.
    """

    kind: PrimitiveKind
    data: np.ndarray  # (H, W, d_p) float32, values in {0, 1}
    label_count: int | None = None

    def validate(self) -> "PrimitiveTensor":
        validate_image(self.data)
        d_p = self.data.shape[2]
        binary = np.isin(self.data, (0.0, 1.0)).all()
        if not binary:
            raise ValueError("primitive samples must be exactly 0 or 1")
        if self.kind is PrimitiveKind.EDGE:
            if d_p != 1:
                raise ValueError(f"edge primitive needs 1 channel, got {d_p}")
        elif self.kind is PrimitiveKind.SEGMENTATION:
            if self.label_count is None or d_p != self.label_count:
                raise ValueError("segmentation primitive needs d_p == label_count")
            self._check_one_hot(self.data)
        elif self.kind is PrimitiveKind.COMBINED:
            if self.label_count is None or d_p != self.label_count + 1:
                raise ValueError("combined primitive needs d_p == label_count + 1")
            self._check_one_hot(self.data[:, :, : self.label_count])
        return self

    @staticmethod
    def _check_one_hot(channels: np.ndarray) -> None:
        sums = channels.sum(axis=2)
        if not np.array_equal(sums, np.ones_like(sums)):
            raise ValueError("label channels are not one-hot per pixel")

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass
class ImagePair:
    """One training pair: primitive x and image y with matching extents."""

    primitive: PrimitiveTensor
    image: np.ndarray

    def validate(self) -> "ImagePair":
        self.primitive.validate()
        validate_image(self.image)
        if self.image.shape[:2] != self.primitive.data.shape[:2]:
            raise DimensionMismatch(
                f"primitive {self.primitive.data.shape[:2]} vs image {self.image.shape[:2]}"
            )
        return self


@dataclass
class SegmentationMap:
    """Integer label grid plus display palette; labels contiguous 0..n-1."""

    labels: np.ndarray  # (H, W) integer label ids
    palette: dict[int, tuple[int, int, int]]
    names: dict[int, str] = field(default_factory=dict)

    @property
    def label_count(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0

    def validate(self) -> "SegmentationMap":
        if self.labels.ndim != 2:
            raise DimensionMismatch(f"label grid must be 2-D, got {self.labels.shape}")
        present = np.unique(self.labels)
        if present.size and (present[0] < 0 or present[-1] >= len(self.palette)):
            raise NonContiguousLabels(f"label ids {present} not covered by palette")
        for lid in range(self.label_count):
            if lid not in self.palette:
                raise NonContiguousLabels(f"palette missing label id {lid}")
        return self


def save_segmentation(seg: SegmentationMap, png_path, palette_path=None) -> None:
    """Persist as indexed-color PNG plus a sidecar palette JSON."""
    seg.validate()
    png_path = Path(png_path)
    pil = Image.fromarray(seg.labels.astype(np.uint8), mode="P")
    flat = []
    for lid in sorted(seg.palette):
        flat.extend(seg.palette[lid])
    pil.putpalette(flat)
    pil.save(png_path, format="PNG")
    if palette_path is None:
        palette_path = png_path.with_suffix(".palette.json")
    doc = {
        "labels": [
            {
                "id": lid,
                "color": list(seg.palette[lid]),
                "name": seg.names.get(lid, f"label_{lid}"),
            }
            for lid in sorted(seg.palette)
        ]
    }
    Path(palette_path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load_segmentation(png_path, palette_path=None) -> SegmentationMap:
    png_path = Path(png_path)
    if not png_path.exists():
        raise IoError(f"no such file: {png_path}")
    if palette_path is None:
        palette_path = png_path.with_suffix(".palette.json")
    try:
        with Image.open(png_path) as im:
            if im.mode != "P":
                raise DecodeError(f"{png_path} is not an indexed-color PNG")
            labels = np.asarray(im, dtype=np.int64)
    except UnidentifiedImageError as e:
        raise DecodeError(f"cannot decode {png_path}: {e}") from e
    doc = json.loads(Path(palette_path).read_text())
    palette = {int(e["id"]): tuple(e["color"]) for e in doc["labels"]}
    names = {int(e["id"]): e.get("name", "") for e in doc["labels"]}
    return SegmentationMap(labels=labels, palette=palette, names=names).validate()


class Interp(Enum):
    BILINEAR = "bilinear"
    NEAREST = "nearest"


@dataclass(frozen=True)
class AugmentConfig:
    """One draw from the augmentation distribution is parameterized here.

    grid_n x grid_n control points spanning the unit square; each point is
    shifted per axis by a uniform amount capped at max_shift_frac of the
    smaller image side. Crop-and-flip runs before the spline warp and both
    stages can be disabled independently (crop_frac=1/flip_prob=0 and
    max_shift_frac=0 respectively).
    """

    grid_n: int = 3
    max_shift_frac: float = 0.10
    smoothness: float = 0.01  # Tikhonov weight on the spline system
    crop_frac: float = 0.9
    flip_prob: float = 0.5
    interp_image: Interp = Interp.BILINEAR
    interp_primitive: Interp = Interp.NEAREST

    def __post_init__(self):
        if not (0 <= self.max_shift_frac < 0.5):
            raise ValueError("max_shift_frac must be in [0, 0.5)")
        if self.grid_n < 2:
            raise ValueError("grid_n must be >= 2")
        if self.smoothness < 0:
            raise ValueError("smoothness must be >= 0")
        if not (0 < self.crop_frac <= 1):
            raise ValueError("crop_frac must be in (0, 1]")
        if not (0 <= self.flip_prob <= 1):
            raise ValueError("flip_prob must be in [0, 1]")

    def to_dict(self) -> dict:
        return {
            "grid_n": self.grid_n,
            "max_shift_frac": self.max_shift_frac,
            "smoothness": self.smoothness,
            "crop_frac": self.crop_frac,
            "flip_prob": self.flip_prob,
            "interp_image": self.interp_image.value,
            "interp_primitive": self.interp_primitive.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AugmentConfig":
        return cls(
            grid_n=int(d.get("grid_n", 3)),
            max_shift_frac=float(d.get("max_shift_frac", 0.10)),
            smoothness=float(d.get("smoothness", 0.01)),
            crop_frac=float(d.get("crop_frac", 0.9)),
            flip_prob=float(d.get("flip_prob", 0.5)),
            interp_image=Interp(d.get("interp_image", "bilinear")),
            interp_primitive=Interp(d.get("interp_primitive", "nearest")),
        )

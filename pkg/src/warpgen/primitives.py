"""Conditioning representations: edge maps, one-hot segmentations, combined.

Edge extraction is a Canny-style pipeline with thresholds expressed as
fractions of the max gradient magnitude, so the detector is invariant to
global intensity scaling. Grayscale conversion uses Rec.601 luma weights
(0.299, 0.587, 0.114).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from warpgen.core import (
    DimensionMismatch,
    NonContiguousLabels,
    PrimitiveKind,
    PrimitiveTensor,
    SegmentationMap,
    UnsupportedChannels,
)

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114], dtype=np.float64)


class MissingPaletteEntry(Exception):
    pass


@dataclass(frozen=True)
class EdgeParams:
    gaussian_sigma: float = 1.0
    low_threshold: float = 0.1   # fraction of max gradient magnitude
    high_threshold: float = 0.2

    def __post_init__(self):
        if not (0 <= self.low_threshold <= self.high_threshold <= 1):
            raise ValueError("need 0 <= low <= high <= 1")


def _to_gray(img: np.ndarray) -> np.ndarray:
    if img.shape[2] == 1:
        return img[:, :, 0].astype(np.float64)
    if img.shape[2] == 3:
        return img.astype(np.float64) @ LUMA_WEIGHTS
    raise UnsupportedChannels(f"edge extraction needs 1 or 3 channels, got {img.shape[2]}")


def _non_maximum_suppression(mag: np.ndarray, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    h, w = mag.shape
    padded = np.pad(mag, 1, mode="constant")
    angle = np.mod(np.arctan2(gy, gx), np.pi)
    # quantize into 4 directions: 0, 45, 90, 135 degrees
    sector = np.floor((angle + np.pi / 8) / (np.pi / 4)).astype(int) % 4
    offsets = {0: (0, 1), 1: (1, 1), 2: (1, 0), 3: (1, -1)}
    rows, cols = np.mgrid[0:h, 0:w]
    keep = np.zeros_like(mag, dtype=bool)
    for s, (dr, dc) in offsets.items():
        m = sector == s
        fwd = padded[rows[m] + 1 + dr, cols[m] + 1 + dc]
        bwd = padded[rows[m] + 1 - dr, cols[m] + 1 - dc]
        keep[m] = (mag[m] >= fwd) & (mag[m] >= bwd)
    return keep


def extract_edges(img: np.ndarray, params: EdgeParams = EdgeParams()) -> PrimitiveTensor:
    """Binary edge map: smooth, Sobel gradients, NMS, hysteresis."""
    gray = _to_gray(img)
    smoothed = ndimage.gaussian_filter(gray, sigma=params.gaussian_sigma)
    gx = ndimage.sobel(smoothed, axis=1)
    gy = ndimage.sobel(smoothed, axis=0)
    mag = np.hypot(gx, gy)
    peak = mag.max()
    edges = np.zeros(gray.shape, dtype=np.float32)
    if peak > 0:
        keep = _non_maximum_suppression(mag, gx, gy)
        # strict comparisons so saturated thresholds (1.0) yield an empty map
        strong = keep & (mag > params.high_threshold * peak)
        weak = keep & (mag > params.low_threshold * peak)
        # hysteresis: keep weak components that touch a strong pixel
        labels, n = ndimage.label(weak, structure=np.ones((3, 3), dtype=int))
        if n:
            hits = np.unique(labels[strong])
            hits = hits[hits > 0]
            edges[np.isin(labels, hits)] = 1.0
    return PrimitiveTensor(kind=PrimitiveKind.EDGE, data=edges[:, :, None]).validate()


def encode_segmentation(seg: SegmentationMap) -> PrimitiveTensor:
    """Expand a label grid into a one-hot tensor with label_count channels."""
    seg.validate()
    n = seg.label_count
    present = np.unique(seg.labels)
    if present.size != n:
        raise NonContiguousLabels(f"label ids {present.tolist()} are not contiguous 0..{n - 1}")
    onehot = np.zeros((*seg.labels.shape, n), dtype=np.float32)
    rows, cols = np.mgrid[0 : seg.labels.shape[0], 0 : seg.labels.shape[1]]
    onehot[rows, cols, seg.labels] = 1.0
    return PrimitiveTensor(kind=PrimitiveKind.SEGMENTATION, data=onehot,
                           label_count=n).validate()


def decode_segmentation(prim: PrimitiveTensor,
                        palette: dict[int, tuple[int, int, int]]) -> SegmentationMap:
    """Inverse of encode_segmentation (argmax over one-hot channels)."""
    if prim.kind is PrimitiveKind.EDGE:
        raise ValueError("edge primitives carry no labels")
    n = prim.label_count
    labels = np.argmax(prim.data[:, :, :n], axis=2).astype(np.int64)
    return SegmentationMap(labels=labels, palette=palette)


def compose_combined(edges: PrimitiveTensor, seg: PrimitiveTensor) -> PrimitiveTensor:
    """Stack [one-hot label channels..., binary edge channel]."""
    if edges.kind is not PrimitiveKind.EDGE or seg.kind is not PrimitiveKind.SEGMENTATION:
        raise ValueError("expects (Edge, Segmentation) in that order")
    if edges.data.shape[:2] != seg.data.shape[:2]:
        raise DimensionMismatch(
            f"edge {edges.data.shape[:2]} vs segmentation {seg.data.shape[:2]}")
    data = np.concatenate([seg.data, edges.data], axis=2)
    return PrimitiveTensor(kind=PrimitiveKind.COMBINED, data=data,
                           label_count=seg.label_count).validate()


def split_combined(prim: PrimitiveTensor) -> tuple[PrimitiveTensor, PrimitiveTensor]:
    if prim.kind is not PrimitiveKind.COMBINED:
        raise ValueError("not a combined primitive")
    n = prim.label_count
    seg = PrimitiveTensor(kind=PrimitiveKind.SEGMENTATION,
                          data=np.ascontiguousarray(prim.data[:, :, :n]),
                          label_count=n)
    edge = PrimitiveTensor(kind=PrimitiveKind.EDGE,
                           data=np.ascontiguousarray(prim.data[:, :, n:]))
    return edge, seg


def primitive_to_display(prim: PrimitiveTensor,
                         palette: dict[int, tuple[int, int, int]] | None = None
                         ) -> np.ndarray:
    """3-channel visualization: palette colors for labels, edges in white."""
    h, w = prim.data.shape[:2]
    out = np.zeros((h, w, 3), dtype=np.float32)
    if prim.kind in (PrimitiveKind.SEGMENTATION, PrimitiveKind.COMBINED):
        if palette is None:
            raise MissingPaletteEntry("segmentation display needs a palette")
        labels = np.argmax(prim.data[:, :, : prim.label_count], axis=2)
        for lid in np.unique(labels):
            if int(lid) not in palette:
                raise MissingPaletteEntry(f"palette missing label id {int(lid)}")
            out[labels == lid] = np.array(palette[int(lid)], dtype=np.float32) / 255.0
    if prim.kind in (PrimitiveKind.EDGE, PrimitiveKind.COMBINED):
        edge = prim.data[:, :, -1] if prim.kind is PrimitiveKind.COMBINED \
            else prim.data[:, :, 0]
        out[edge == 1.0] = 1.0
    return out

"""Thin-plate-spline fitting, rasterization, and warp sampling.

Conventions (fixed so the rasterizer, the brute-force energy oracle, and
the trainer agree bit-for-bit):

* kernel U(r) = r^2 * log(r), with U(0) = 0
* control points and evaluation in normalized coordinates, (x, y) in
  [0,1]^2 with x along columns and y along rows
* pixel (row, col) has the normalized center ((col+0.5)/W, (row+0.5)/H)
* warp fields are backward maps: the spline is fitted targets -> sources
  and each output pixel pulls its sample from the mapped source location
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from warpgen.core import (
    AugmentConfig,
    DimensionMismatch,
    ImagePair,
    Interp,
    PrimitiveTensor,
)


class DegenerateGeometry(Exception):
    pass


class SingularSystem(Exception):
    pass


@dataclass
class ControlGrid:
    """Source control points and their randomly shifted targets."""

    sources: np.ndarray  # (K, 2) normalized (x, y)
    targets: np.ndarray  # (K, 2)
    image_height: int
    image_width: int

    def to_json(self) -> dict:
        return {
            "sources": self.sources.tolist(),
            "targets": self.targets.tolist(),
            "image_height": self.image_height,
            "image_width": self.image_width,
        }

    @classmethod
    def from_json(cls, d: dict) -> "ControlGrid":
        return cls(
            sources=np.asarray(d["sources"], dtype=np.float64),
            targets=np.asarray(d["targets"], dtype=np.float64),
            image_height=int(d["image_height"]),
            image_width=int(d["image_width"]),
        )


@dataclass
class TpsModel:
    affine: np.ndarray       # (2, 3): rows are output x/y, columns (1, x, y)
    rbf_weights: np.ndarray  # (K, 2)
    centers: np.ndarray      # (K, 2)
    smoothness: float


@dataclass
class WarpField:
    """Dense backward map in pixel units; coordinates may leave the frame."""

    height: int
    width: int
    map_x: np.ndarray  # (H, W) float source column coordinate
    map_y: np.ndarray  # (H, W) float source row coordinate

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(b"TPSW")
            fh.write(struct.pack("<II", self.height, self.width))
            fh.write(self.map_x.astype("<f4").tobytes())
            fh.write(self.map_y.astype("<f4").tobytes())

    @classmethod
    def load(cls, path) -> "WarpField":
        raw = Path(path).read_bytes()
        if raw[:4] != b"TPSW":
            raise ValueError("bad magic; not a warp-field file")
        h, w = struct.unpack("<II", raw[4:12])
        n = h * w * 4
        map_x = np.frombuffer(raw[12 : 12 + n], dtype="<f4").reshape(h, w)
        map_y = np.frombuffer(raw[12 + n : 12 + 2 * n], dtype="<f4").reshape(h, w)
        return cls(height=h, width=w, map_x=map_x.copy(), map_y=map_y.copy())


@dataclass
class CropFlipParams:
    crop_origin: tuple[int, int]  # (row, col)
    crop_height: int
    crop_width: int
    flip_horizontal: bool

    def is_identity(self, height: int, width: int) -> bool:
        return (
            self.crop_origin == (0, 0)
            and self.crop_height == height
            and self.crop_width == width
            and not self.flip_horizontal
        )

    def to_json(self) -> dict:
        return {
            "crop_origin": list(self.crop_origin),
            "crop_height": self.crop_height,
            "crop_width": self.crop_width,
            "flip_horizontal": self.flip_horizontal,
        }

    @classmethod
    def from_json(cls, d: dict) -> "CropFlipParams":
        return cls(
            crop_origin=(int(d["crop_origin"][0]), int(d["crop_origin"][1])),
            crop_height=int(d["crop_height"]),
            crop_width=int(d["crop_width"]),
            flip_horizontal=bool(d["flip_horizontal"]),
        )


def _kernel_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """U(|a_i - b_j|) with U(r) = r^2 log r and U(0) = 0."""
    d2 = ((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        k = 0.5 * d2 * np.log(d2)  # r^2 log r = (1/2) r^2 log r^2
    k[d2 == 0.0] = 0.0
    return k


def fit_tps(grid: ControlGrid, smoothness: float) -> TpsModel:
    """Closed-form regularized thin-plate spline through the control grid.

    Solves [[K + lam*I, P], [P^T, 0]] [w; a] = [t; 0] with P = [1, x, y]
    rows. lam = 0 interpolates the targets exactly; lam > 0 trades misfit
    for bending energy (lam is a Tikhonov weight on the kernel block,
    which corresponds to an energy weight of lam / (8*pi)).
    """
    src = np.asarray(grid.sources, dtype=np.float64)
    tgt = np.asarray(grid.targets, dtype=np.float64)
    k = src.shape[0]
    if k < 3:
        raise DegenerateGeometry("need at least 3 control points")
    d2 = ((src[:, None, :] - src[None, :, :]) ** 2).sum(axis=2)
    if np.any(d2[~np.eye(k, dtype=bool)] == 0.0):
        raise DegenerateGeometry("duplicate source control points")
    p = np.hstack([np.ones((k, 1)), src])
    if np.linalg.matrix_rank(p) < 3:
        raise DegenerateGeometry("collinear source control points")

    kmat = _kernel_matrix(src, src)
    lsys = np.zeros((k + 3, k + 3))
    lsys[:k, :k] = kmat + smoothness * np.eye(k)
    lsys[:k, k:] = p
    lsys[k:, :k] = p.T
    rhs = np.vstack([tgt, np.zeros((3, 2))])
    try:
        sol = np.linalg.solve(lsys, rhs)
    except np.linalg.LinAlgError as e:
        raise SingularSystem(str(e)) from e
    if not np.all(np.isfinite(sol)):
        raise SingularSystem("non-finite solution")
    weights = sol[:k]
    affine = sol[k:].T  # (2, 3), columns (1, x, y)
    return TpsModel(affine=affine, rbf_weights=weights, centers=src,
                    smoothness=smoothness)


def evaluate(model: TpsModel, points: np.ndarray) -> np.ndarray:
    """Evaluate the spline at (N, 2) normalized points (also outside [0,1]^2)."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    ones = np.ones((pts.shape[0], 1))
    out = np.hstack([ones, pts]) @ model.affine.T
    out += _kernel_matrix(pts, model.centers) @ model.rbf_weights
    return out if np.asarray(points).ndim == 2 else out[0]


def identity_field(height: int, width: int) -> WarpField:
    cols, rows = np.meshgrid(np.arange(width, dtype=np.float64),
                             np.arange(height, dtype=np.float64))
    return WarpField(height=height, width=width, map_x=cols, map_y=rows)


def rasterize(model_or_grid, height: int, width: int,
              smoothness: float | None = None) -> WarpField:
    """Backward warp field for an output raster of the given extent.

    Accepts a ControlGrid (preferred: fits the inverse-direction spline
    targets -> sources so output pixels pull from the source image) or an
    already-fitted backward TpsModel.
    """
    if isinstance(model_or_grid, ControlGrid):
        grid = model_or_grid
        inverse = ControlGrid(sources=grid.targets, targets=grid.sources,
                              image_height=grid.image_height,
                              image_width=grid.image_width)
        model = fit_tps(inverse, smoothness if smoothness is not None else 0.0)
    else:
        model = model_or_grid
    cols, rows = np.meshgrid(np.arange(width), np.arange(height))
    pts = np.stack([(cols.ravel() + 0.5) / width,
                    (rows.ravel() + 0.5) / height], axis=1)
    mapped = evaluate(model, pts)
    map_x = mapped[:, 0].reshape(height, width) * width - 0.5
    map_y = mapped[:, 1].reshape(height, width) * height - 0.5
    return WarpField(height=height, width=width, map_x=map_x, map_y=map_y)


def _sample_bilinear(img: np.ndarray, sx: np.ndarray, sy: np.ndarray) -> np.ndarray:
    h, w = img.shape[:2]
    sx = np.clip(sx, 0.0, w - 1.0)
    sy = np.clip(sy, 0.0, h - 1.0)
    x0 = np.floor(sx).astype(np.intp)
    y0 = np.floor(sy).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = (sx - x0)[..., None].astype(img.dtype)
    fy = (sy - y0)[..., None].astype(img.dtype)
    top = img[y0, x0] * (1 - fx) + img[y0, x1] * fx
    bot = img[y1, x0] * (1 - fx) + img[y1, x1] * fx
    return top * (1 - fy) + bot * fy


def _sample_nearest(img: np.ndarray, sx: np.ndarray, sy: np.ndarray) -> np.ndarray:
    h, w = img.shape[:2]
    ix = np.clip(np.rint(sx), 0, w - 1).astype(np.intp)
    iy = np.clip(np.rint(sy), 0, h - 1).astype(np.intp)
    return img[iy, ix]


def apply_warp(field: WarpField, img: np.ndarray, interp: Interp) -> np.ndarray:
    """Pull-sample img through a backward warp field (edge-clamped)."""
    if img.shape[:2] != (field.height, field.width):
        raise DimensionMismatch(
            f"field {(field.height, field.width)} vs image {img.shape[:2]}")
    if interp is Interp.BILINEAR:
        out = _sample_bilinear(img, field.map_x, field.map_y)
    else:
        out = _sample_nearest(img, field.map_x, field.map_y)
    return np.clip(out, 0.0, 1.0).astype(img.dtype, copy=False)


def equispaced_grid(grid_n: int) -> np.ndarray:
    """grid_n x grid_n control points spanning [0,1]^2, row-major."""
    axis = np.linspace(0.0, 1.0, grid_n)
    gx, gy = np.meshgrid(axis, axis)
    return np.stack([gx.ravel(), gy.ravel()], axis=1)


def sample_warp(rng: np.random.Generator, cfg: AugmentConfig,
                height: int, width: int) -> ControlGrid:
    """Draw one random control grid: per-axis uniform shifts capped at
    max_shift_frac of the smaller image side (in pixels)."""
    sources = equispaced_grid(cfg.grid_n)
    shift_px = cfg.max_shift_frac * min(height, width)
    k = sources.shape[0]
    d = rng.uniform(-shift_px, shift_px, size=(k, 2))
    targets = sources + d / np.array([width, height], dtype=np.float64)
    return ControlGrid(sources=sources, targets=targets,
                       image_height=height, image_width=width)


def sample_crop_flip(rng: np.random.Generator, cfg: AugmentConfig,
                     height: int, width: int) -> CropFlipParams:
    ch = math.ceil(cfg.crop_frac * height)
    cw = math.ceil(cfg.crop_frac * width)
    r0 = int(rng.integers(0, height - ch + 1))
    c0 = int(rng.integers(0, width - cw + 1))
    flip = bool(rng.random() < cfg.flip_prob)
    return CropFlipParams(crop_origin=(r0, c0), crop_height=ch,
                          crop_width=cw, flip_horizontal=flip)


def apply_crop_flip(params: CropFlipParams, img: np.ndarray,
                    interp: Interp) -> np.ndarray:
    """Crop the window, optionally mirror, resize back to the input extent."""
    h, w = img.shape[:2]
    r0, c0 = params.crop_origin
    if r0 < 0 or c0 < 0 or r0 + params.crop_height > h or c0 + params.crop_width > w:
        raise DimensionMismatch("crop window leaves the image")
    win = img[r0 : r0 + params.crop_height, c0 : c0 + params.crop_width]
    if params.flip_horizontal:
        win = win[:, ::-1]
    if win.shape[:2] == (h, w):
        return np.ascontiguousarray(win)
    # resize back via center-aligned sampling; exact for unit scale
    rows = (np.arange(h) + 0.5) * params.crop_height / h - 0.5
    cols = (np.arange(w) + 0.5) * params.crop_width / w - 0.5
    sx, sy = np.meshgrid(cols, rows)
    if interp is Interp.BILINEAR:
        out = _sample_bilinear(np.ascontiguousarray(win), sx, sy)
    else:
        out = _sample_nearest(np.ascontiguousarray(win), sx, sy)
    return np.clip(out, 0.0, 1.0).astype(img.dtype, copy=False)


def augment_pair(pair: ImagePair, rng: np.random.Generator,
                 cfg: AugmentConfig) -> ImagePair:
    """One draw from the augmentation distribution applied to both members.

    Crop/flip first, then the spline warp; the primitive is always sampled
    with nearest neighbor so one-hot and binary invariants survive.
    """
    grid = sample_warp(rng, cfg, pair.image.shape[0], pair.image.shape[1])
    cf = sample_crop_flip(rng, cfg, pair.image.shape[0], pair.image.shape[1])
    return apply_params(pair, grid, cf, cfg)


def apply_params(pair: ImagePair, grid: ControlGrid, cf: CropFlipParams,
                 cfg: AugmentConfig) -> ImagePair:
    """Deterministically apply recorded augmentation parameters."""
    img = pair.image
    prim = pair.primitive.data
    h, w = img.shape[:2]
    if not cf.is_identity(h, w):
        img = apply_crop_flip(cf, img, cfg.interp_image)
        prim = apply_crop_flip(cf, prim, cfg.interp_primitive)
    # exact-identity grids skip the solve so the identity config stays
    # bit-identical (a fitted spline reproduces identity only to fp error)
    if not np.array_equal(grid.sources, grid.targets):
        field = rasterize(grid, h, w, smoothness=cfg.smoothness)
        img = apply_warp(field, img, cfg.interp_image)
        prim = apply_warp(field, prim, cfg.interp_primitive)
    out = ImagePair(
        primitive=replace(pair.primitive, data=prim),
        image=img,
    )
    return out.validate()


def save_control_grid(grid: ControlGrid, path) -> None:
    Path(path).write_text(json.dumps(grid.to_json(), sort_keys=True) + "\n")


def load_control_grid(path) -> ControlGrid:
    return ControlGrid.from_json(json.loads(Path(path).read_text()))

"""Deterministic augmented-dataset generation, regeneration, and serving.

Every sample is a pure function of (source pair bytes, sample index,
master seed, config): sample i draws from derive_stream(seed, i), records
the drawn parameters in manifest.json, and can be regenerated bit-exactly
from the manifest alone. Index 0 is always the untouched source pair.
"""

from __future__ import annotations

import io
import json
import zipfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from warpgen.core import (
    AugmentConfig,
    ImagePair,
    IoError,
    PrimitiveKind,
    PrimitiveTensor,
    SeedSpec,
    SegmentationMap,
    derive_stream,
    load_image,
    load_segmentation,
    save_image,
    save_segmentation,
)
from warpgen.primitives import (
    compose_combined,
    decode_segmentation,
    encode_segmentation,
    split_combined,
)
from warpgen.tps import (
    ControlGrid,
    CropFlipParams,
    apply_params,
    equispaced_grid,
    sample_crop_flip,
    sample_warp,
)

SCHEMA_VERSION = 1


class IndexOutOfRange(Exception):
    pass


def identity_grid(cfg: AugmentConfig, height: int, width: int) -> ControlGrid:
    pts = equispaced_grid(cfg.grid_n)
    return ControlGrid(sources=pts, targets=pts.copy(),
                       image_height=height, image_width=width)


def identity_crop_flip(height: int, width: int) -> CropFlipParams:
    return CropFlipParams(crop_origin=(0, 0), crop_height=height,
                          crop_width=width, flip_horizontal=False)


def save_primitive(prim: PrimitiveTensor, out_dir: Path, stem: str,
                   palette: dict | None = None) -> dict:
    """Persist a primitive as its constituent files; returns relative paths."""
    out_dir = Path(out_dir)
    entry: dict = {"kind": prim.kind.value}
    if prim.kind is PrimitiveKind.EDGE:
        edge = prim
        seg = None
    elif prim.kind is PrimitiveKind.SEGMENTATION:
        edge = None
        seg = prim
    else:
        edge, seg = split_combined(prim)
    if edge is not None:
        name = f"{stem}_edge.png"
        img = Image.fromarray(edge.data[:, :, 0].astype(bool))
        img.save(out_dir / name, format="PNG")
        entry["edge"] = name
    if seg is not None:
        if palette is None:
            raise ValueError("segmentation primitives need a palette to persist")
        name = f"{stem}_seg.png"
        seg_map = decode_segmentation(seg, palette)
        save_segmentation(seg_map, out_dir / name,
                          out_dir / f"{stem}_seg.palette.json")
        entry["segmentation"] = name
        entry["palette"] = f"{stem}_seg.palette.json"
    return entry


def load_primitive(entry: dict, base_dir: Path) -> PrimitiveTensor:
    base_dir = Path(base_dir)
    kind = PrimitiveKind(entry["kind"])
    edge = seg = None
    if "edge" in entry:
        arr = load_image(base_dir / entry["edge"])
        edge = PrimitiveTensor(kind=PrimitiveKind.EDGE,
                               data=(arr[:, :, :1] > 0.5).astype(np.float32))
    if "segmentation" in entry:
        seg_map = load_segmentation(base_dir / entry["segmentation"],
                                    base_dir / entry["palette"])
        seg = encode_segmentation(seg_map)
    if kind is PrimitiveKind.EDGE:
        return edge.validate()
    if kind is PrimitiveKind.SEGMENTATION:
        return seg.validate()
    return compose_combined(edge, seg)


@dataclass
class SampleManifest:
    master_seed: int
    stream_id: int
    config: AugmentConfig
    source_image: str
    source_primitive: dict
    samples: list[dict]
    base_dir: Path
    palette: dict | None = None

    @property
    def n(self) -> int:
        return len(self.samples)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "master_seed": self.master_seed,
            "stream_id": self.stream_id,
            "config": self.config.to_dict(),
            "source": {"image": self.source_image,
                       "primitive": self.source_primitive},
            "samples": self.samples,
        }

    def save(self, path=None) -> Path:
        path = Path(path) if path else self.base_dir / "manifest.json"
        path.write_text(json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n")
        return path

    @classmethod
    def load(cls, path) -> "SampleManifest":
        path = Path(path)
        doc = json.loads(path.read_text())
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported manifest schema: {doc.get('schema_version')}")
        m = cls(
            master_seed=int(doc["master_seed"]),
            stream_id=int(doc["stream_id"]),
            config=AugmentConfig.from_dict(doc["config"]),
            source_image=doc["source"]["image"],
            source_primitive=doc["source"]["primitive"],
            samples=doc["samples"],
            base_dir=path.parent,
        )
        pal = m.source_primitive.get("palette")
        if pal:
            pdoc = json.loads((m.base_dir / pal).read_text())
            m.palette = {int(e["id"]): tuple(e["color"]) for e in pdoc["labels"]}
        return m

    def source_pair(self) -> ImagePair:
        image = load_image(self.base_dir / self.source_image)
        prim = load_primitive(self.source_primitive, self.base_dir)
        return ImagePair(primitive=prim, image=image).validate()


def generate_dataset(pair: ImagePair, n: int, seed: SeedSpec,
                     cfg: AugmentConfig, out_dir,
                     palette: dict | None = None) -> SampleManifest:
    """Emit n augmented pairs plus manifest.json into out_dir."""
    if n < 1:
        raise ValueError("n must be >= 1")
    pair.validate()
    out_dir = Path(out_dir)
    if not out_dir.parent.exists():
        raise IoError(f"parent directory missing: {out_dir.parent}")
    out_dir.mkdir(exist_ok=True)
    h, w = pair.image.shape[:2]

    save_image(pair.image, out_dir / "source_image.png")
    src_prim_entry = save_primitive(pair.primitive, out_dir, "source", palette)
    # regenerate from the quantized persisted source, so get_sample on the
    # manifest is bit-identical to the emitted files
    source_image = load_image(out_dir / "source_image.png")
    source_prim = load_primitive(src_prim_entry, out_dir)
    pair = ImagePair(primitive=source_prim, image=source_image).validate()

    samples = []
    for i in range(n):
        if i == 0:
            grid = identity_grid(cfg, h, w)
            cf = identity_crop_flip(h, w)
        else:
            rng = derive_stream(seed, i)
            grid = sample_warp(rng, cfg, h, w)
            cf = sample_crop_flip(rng, cfg, h, w)
        out = apply_params(pair, grid, cf, cfg)
        img_name = f"image_{i:05d}.png"
        save_image(out.image, out_dir / img_name)
        prim_entry = save_primitive(out.primitive, out_dir, f"primitive_{i:05d}",
                                    palette)
        samples.append({
            "index": i,
            "warp_grid": grid.to_json(),
            "crop_flip": cf.to_json(),
            "image_path": img_name,
            "primitive_files": prim_entry,
        })
    manifest = SampleManifest(
        master_seed=seed.master_seed,
        stream_id=seed.stream_id,
        config=cfg,
        source_image="source_image.png",
        source_primitive=src_prim_entry,
        samples=samples,
        base_dir=out_dir,
        palette=palette,
    )
    manifest.save()
    return manifest


def get_sample(manifest: SampleManifest, index: int,
               source: ImagePair | None = None) -> ImagePair:
    """Regenerate sample `index` from its recorded parameters."""
    if not (0 <= index < manifest.n):
        raise IndexOutOfRange(f"index {index} not in [0, {manifest.n})")
    rec = manifest.samples[index]
    pair = source if source is not None else manifest.source_pair()
    grid = ControlGrid.from_json(rec["warp_grid"])
    cf = CropFlipParams.from_json(rec["crop_flip"])
    return apply_params(pair, grid, cf, manifest.config)


def fresh_sample(pair: ImagePair, cfg: AugmentConfig, seed: int,
                 palette: dict | None = None) -> ImagePair:
    """One newly drawn augmented pair, deterministic in (pair, cfg, seed)."""
    rng = derive_stream(SeedSpec(master_seed=seed), 0)
    h, w = pair.image.shape[:2]
    grid = sample_warp(rng, cfg, h, w)
    cf = sample_crop_flip(rng, cfg, h, w)
    return apply_params(pair, grid, cf, cfg)


def pair_to_zip(pair: ImagePair, palette: dict | None = None) -> bytes:
    """Serialize a pair as a deterministic zip of PNGs (fixed timestamps)."""
    buf = io.BytesIO()

    def png_bytes(write):
        b = io.BytesIO()
        write(b)
        return b.getvalue()

    with zipfile.ZipFile(buf, "w", compression=zipfile.ZIP_STORED) as zf:
        def add(name: str, data: bytes):
            info = zipfile.ZipInfo(name, date_time=(1980, 1, 1, 0, 0, 0))
            zf.writestr(info, data)

        img8 = np.clip(np.rint(pair.image * 255.0), 0, 255).astype(np.uint8)
        pil = Image.fromarray(img8[:, :, 0] if img8.shape[2] == 1 else img8)
        add("image.png", png_bytes(lambda b: pil.save(b, format="PNG")))

        prim = pair.primitive
        if prim.kind in (PrimitiveKind.EDGE, PrimitiveKind.COMBINED):
            edge = prim.data[:, :, -1] if prim.kind is PrimitiveKind.COMBINED \
                else prim.data[:, :, 0]
            pil_e = Image.fromarray(edge.astype(bool))
            add("primitive_edge.png",
                png_bytes(lambda b: pil_e.save(b, format="PNG")))
        if prim.kind in (PrimitiveKind.SEGMENTATION, PrimitiveKind.COMBINED):
            if palette is None:
                raise ValueError("segmentation primitives need a palette")
            n = prim.label_count
            labels = np.argmax(prim.data[:, :, :n], axis=2).astype(np.uint8)
            pil_s = Image.fromarray(labels, mode="P")
            flat = []
            for lid in sorted(palette):
                flat.extend(palette[lid])
            pil_s.putpalette(flat)
            add("primitive_seg.png",
                png_bytes(lambda b: pil_s.save(b, format="PNG")))
            pal_doc = {"labels": [{"id": lid, "color": list(palette[lid]),
                                   "name": f"label_{lid}"}
                                  for lid in sorted(palette)]}
            add("palette.json",
                (json.dumps(pal_doc, indent=2, sort_keys=True) + "\n").encode())
    return buf.getvalue()


def pair_from_zip(data: bytes) -> ImagePair:
    """Inverse of pair_to_zip."""
    with zipfile.ZipFile(io.BytesIO(data)) as zf:
        names = set(zf.namelist())
        with zf.open("image.png") as fh:
            im = Image.open(fh)
            if im.mode not in ("L", "RGB"):
                im = im.convert("RGB")
            arr = np.asarray(im, dtype=np.float32) / 255.0
        if arr.ndim == 2:
            arr = arr[:, :, None]
        edge = seg = None
        if "primitive_edge.png" in names:
            with zf.open("primitive_edge.png") as fh:
                e = np.asarray(Image.open(fh).convert("L"), dtype=np.float32)
            edge = PrimitiveTensor(kind=PrimitiveKind.EDGE,
                                   data=(e > 127)[:, :, None].astype(np.float32))
        if "primitive_seg.png" in names:
            with zf.open("primitive_seg.png") as fh:
                labels = np.asarray(Image.open(fh), dtype=np.int64)
            pal_doc = json.loads(zf.read("palette.json").decode())
            palette = {int(x["id"]): tuple(x["color"]) for x in pal_doc["labels"]}
            seg = encode_segmentation(SegmentationMap(labels=labels,
                                                      palette=palette))
    if edge is not None and seg is not None:
        prim = compose_combined(edge, seg)
    else:
        prim = edge if edge is not None else seg
    return ImagePair(primitive=prim, image=arr).validate()

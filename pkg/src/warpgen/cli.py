"""Command-line entry points: augment, serve, extract-edges, eval."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from warpgen import augmentor, metrics, server
from warpgen.core import (
    AugmentConfig,
    ImagePair,
    PrimitiveKind,
    PrimitiveTensor,
    SeedSpec,
    load_image,
    load_segmentation,
    save_image,
)
from warpgen.primitives import EdgeParams, compose_combined, encode_segmentation, extract_edges


def _load_pair(args) -> tuple[ImagePair, dict | None]:
    image = load_image(args.image)
    edge_arr = load_image(args.primitive)
    edge = PrimitiveTensor(kind=PrimitiveKind.EDGE,
                           data=(edge_arr[:, :, :1] > 0.5).astype(np.float32))
    palette = None
    if args.segmentation:
        seg_map = load_segmentation(args.segmentation, args.palette)
        palette = seg_map.palette
        seg = encode_segmentation(seg_map)
        prim = compose_combined(edge, seg)
    else:
        prim = edge
    return ImagePair(primitive=prim, image=image).validate(), palette


def cmd_augment(args) -> int:
    cfg = AugmentConfig(
        grid_n=args.grid,
        max_shift_frac=args.max_shift,
        smoothness=getattr(args, "lambda"),
        crop_frac=args.crop_frac,
        flip_prob=args.flip_prob,
    )
    pair, palette = _load_pair(args)
    manifest = augmentor.generate_dataset(
        pair, args.n, SeedSpec(master_seed=args.seed), cfg, args.out,
        palette=palette)
    print(f"wrote {manifest.n} samples to {manifest.base_dir}")
    return 0


def cmd_serve(args) -> int:
    manifest = augmentor.SampleManifest.load(args.manifest)
    print(f"serving {manifest.n} samples on {args.bind}")
    server.serve(manifest, args.bind)
    return 0


def cmd_extract_edges(args) -> int:
    img = load_image(args.image)
    prim = extract_edges(img, EdgeParams(gaussian_sigma=args.sigma,
                                         low_threshold=args.low,
                                         high_threshold=args.high))
    save_image(prim.data, args.out)
    return 0


def cmd_eval(args) -> int:
    a = load_image(args.ref)
    b = load_image(args.test)
    print(metrics.report(a, b).to_json())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="warpgen")
    sub = p.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("augment", help="generate a deterministic augmented dataset")
    pa.add_argument("--image", required=True)
    pa.add_argument("--primitive", required=True, help="edge-map PNG")
    pa.add_argument("--segmentation", default=None, help="indexed PNG label map")
    pa.add_argument("--palette", default=None, help="palette JSON sidecar")
    pa.add_argument("--n", type=int, default=1000)
    pa.add_argument("--seed", type=int, default=7)
    pa.add_argument("--lambda", type=float, default=0.01, dest="lambda")
    pa.add_argument("--max-shift", type=float, default=0.1)
    pa.add_argument("--grid", type=int, default=3)
    pa.add_argument("--crop-frac", type=float, default=0.9)
    pa.add_argument("--flip-prob", type=float, default=0.5)
    pa.add_argument("--out", required=True)
    pa.set_defaults(func=cmd_augment)

    ps = sub.add_parser("serve", help="serve samples and fresh draws over HTTP")
    ps.add_argument("--manifest", required=True)
    ps.add_argument("--bind", default="127.0.0.1:8791")
    ps.set_defaults(func=cmd_serve)

    pe = sub.add_parser("extract-edges", help="binary edge map from an image")
    pe.add_argument("--image", required=True)
    pe.add_argument("--out", required=True)
    pe.add_argument("--sigma", type=float, default=1.0)
    pe.add_argument("--low", type=float, default=0.1)
    pe.add_argument("--high", type=float, default=0.2)
    pe.set_defaults(func=cmd_extract_edges)

    pv = sub.add_parser("eval", help="L1/PSNR/SSIM between two images")
    pv.add_argument("--ref", required=True)
    pv.add_argument("--test", required=True)
    pv.set_defaults(func=cmd_eval)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry points: train, infer, bench, serve."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np
from PIL import Image

from pairtrainer.bench import BenchConfig, benchmark_video
from pairtrainer.data import open_source
from pairtrainer.specs import DiscriminatorSpec, GeneratorSpec, LossConfig
from pairtrainer.train import TrainState, infer, train


def cmd_train(args) -> int:
    source = open_source(args.source)
    prim, _ = source.source_pair()
    d_p = prim.shape[2]
    gen_spec = GeneratorSpec(input_channels=d_p, base_width=args.base_width)
    disc_spec = DiscriminatorSpec(input_channels=d_p + 3,
                                  base_width=args.base_width)
    loss_cfg = LossConfig(alpha=args.alpha)
    state = train(source, gen_spec, disc_spec, loss_cfg,
                  iterations=args.iters, seed=args.seed, out_dir=args.out,
                  log_every=args.log_every)
    print(f"trained {state.iteration} iterations; checkpoints in {args.out}")
    return 0


def cmd_infer(args) -> int:
    state = TrainState.load(args.ckpt)
    arr = np.asarray(Image.open(args.primitive).convert("L"), dtype=np.float32)
    prim = (arr > 127).astype(np.float32)[:, :, None]
    out = infer(state, prim)
    Image.fromarray(
        np.clip(np.rint(out * 255.0), 0, 255).astype(np.uint8)
    ).save(args.out)
    return 0


def cmd_bench(args) -> int:
    cfg = BenchConfig(iterations=args.iters, n_augmented=args.n_augmented,
                      seed=args.seed, max_shift=args.max_shift,
                      crop_frac=args.crop_frac, flip_prob=args.flip_prob)
    report = benchmark_video(args.frames, args.train_index, cfg, args.work)
    print(json.dumps(report["mean"], indent=2))
    return 0


def cmd_serve(args) -> int:
    from pairtrainer.serve import serve
    serve(TrainState.load(args.ckpt), args.bind)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pairtrainer")
    sub = p.add_subparsers(dest="command", required=True)

    pt = sub.add_parser("train", help="train on an augmented pair stream")
    pt.add_argument("--source", required=True,
                    help="manifest dir/path or sample-service URL")
    pt.add_argument("--out", required=True)
    pt.add_argument("--iters", type=int, default=16000)
    pt.add_argument("--alpha", type=float, default=1.0)
    pt.add_argument("--seed", type=int, default=7)
    pt.add_argument("--base-width", type=int, default=32)
    pt.add_argument("--log-every", type=int, default=500)
    pt.set_defaults(func=cmd_train)

    pi = sub.add_parser("infer", help="map one primitive through the generator")
    pi.add_argument("--ckpt", required=True)
    pi.add_argument("--primitive", required=True)
    pi.add_argument("--out", required=True)
    pi.set_defaults(func=cmd_infer)

    pb = sub.add_parser("bench", help="train on one frame, score the rest")
    pb.add_argument("--frames", required=True)
    pb.add_argument("--train-index", type=int, default=0)
    pb.add_argument("--work", required=True)
    pb.add_argument("--iters", type=int, default=800)
    pb.add_argument("--n-augmented", type=int, default=200)
    pb.add_argument("--seed", type=int, default=0)
    pb.add_argument("--max-shift", type=float, default=0.1)
    pb.add_argument("--crop-frac", type=float, default=0.9)
    pb.add_argument("--flip-prob", type=float, default=0.5)
    pb.set_defaults(func=cmd_bench)

    ps = sub.add_parser("serve", help="inference HTTP service")
    ps.add_argument("--ckpt", required=True)
    ps.add_argument("--bind", default="127.0.0.1:8792")
    ps.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Frame-by-frame benchmark: train on one designated frame of a clip, map
every other frame's primitive through the trained generator, score the
results.

All primitive extraction, dataset generation, and metric evaluation go
through the augmentation engine's CLI (`warpgen`), keeping this package a
pure consumer of its public surfaces.
"""

from __future__ import annotations

import json
import shutil
import subprocess
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from pairtrainer.data import ManifestSource
from pairtrainer.specs import DiscriminatorSpec, GeneratorSpec, LossConfig
from pairtrainer.train import TrainState, infer, train


@dataclass
class BenchConfig:
    iterations: int = 800
    n_augmented: int = 200
    seed: int = 0
    max_shift: float = 0.1   # 0 disables the spline warp (crop/flip only)
    crop_frac: float = 0.9
    flip_prob: float = 0.5
    base_width: int = 24
    edge_sigma: float = 1.0


def _warpgen(*args) -> None:
    cmd = [sys.executable, "-m", "warpgen.cli", *map(str, args)]
    subprocess.run(cmd, check=True, capture_output=True, text=True)


def _eval_cli(ref: Path, test: Path) -> dict:
    cmd = [sys.executable, "-m", "warpgen.cli", "eval",
           "--ref", str(ref), "--test", str(test)]
    out = subprocess.run(cmd, check=True, capture_output=True, text=True).stdout
    return json.loads(out)


def list_frames(frames_dir) -> list[Path]:
    frames = sorted(Path(frames_dir).glob("*.png"))
    if not frames:
        raise FileNotFoundError(f"no PNG frames in {frames_dir}")
    return frames


def train_on_frame(frames_dir, train_index: int, cfg: BenchConfig,
                   work_dir) -> TrainState:
    frames = list_frames(frames_dir)
    if not (0 <= train_index < len(frames)):
        raise IndexError(f"train_index {train_index} out of range")
    work = Path(work_dir)
    work.mkdir(parents=True, exist_ok=True)

    train_frame = frames[train_index]
    edge_path = work / "train_edges.png"
    _warpgen("extract-edges", "--image", train_frame, "--out", edge_path,
             "--sigma", cfg.edge_sigma)
    dataset = work / "dataset"
    if dataset.exists():
        shutil.rmtree(dataset)
    _warpgen("augment", "--image", train_frame, "--primitive", edge_path,
             "--n", cfg.n_augmented, "--seed", cfg.seed,
             "--max-shift", cfg.max_shift, "--crop-frac", cfg.crop_frac,
             "--flip-prob", cfg.flip_prob, "--out", dataset)

    source = ManifestSource(dataset)
    gen_spec = GeneratorSpec(input_channels=1, base_width=cfg.base_width)
    disc_spec = DiscriminatorSpec(input_channels=4, base_width=cfg.base_width)
    return train(source, gen_spec, disc_spec, LossConfig(),
                 iterations=cfg.iterations, seed=cfg.seed,
                 out_dir=work / "ckpt")


def benchmark_video(frames_dir, train_index: int, cfg: BenchConfig,
                    work_dir) -> dict:
    """Returns {"mean": {...}, "per_frame": [...]} of held-out L1/PSNR/SSIM."""
    frames = list_frames(frames_dir)
    work = Path(work_dir)
    state = train_on_frame(frames_dir, train_index, cfg, work)

    out_frames = work / "generated"
    out_frames.mkdir(exist_ok=True)
    per_frame = []
    for i, frame in enumerate(frames):
        if i == train_index:
            continue
        edge_path = work / f"edges_{i:05d}.png"
        _warpgen("extract-edges", "--image", frame, "--out", edge_path,
                 "--sigma", cfg.edge_sigma)
        with Image.open(edge_path) as im:
            prim = (np.asarray(im.convert("L"), dtype=np.float32) > 127
                    ).astype(np.float32)[:, :, None]
        gen_img = infer(state, prim)
        gen_path = out_frames / f"frame_{i:05d}.png"
        Image.fromarray(
            np.clip(np.rint(gen_img * 255.0), 0, 255).astype(np.uint8)
        ).save(gen_path)
        metrics = _eval_cli(frame, gen_path)
        metrics["frame"] = i
        per_frame.append(metrics)

    finite_psnr = [m["psnr"] for m in per_frame if np.isfinite(m["psnr"])]
    mean = {
        "l1": float(np.mean([m["l1"] for m in per_frame])),
        "psnr": float(np.mean(finite_psnr)) if finite_psnr else float("inf"),
        "ssim": float(np.mean([m["ssim"] for m in per_frame])),
    }
    report = {"mean": mean, "per_frame": per_frame,
              "train_index": train_index}
    (work / "bench_report.json").write_text(json.dumps(report, indent=2) + "\n")
    return report

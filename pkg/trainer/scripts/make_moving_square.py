#!/usr/bin/env python3
"""Write the synthetic moving-square clip used by the benchmark tests:
16 numbered 64x64 PNG frames of a textured rectangle that translates and
changes shape (size and aspect ratio drift over time) over a two-band
background whose boundary bows into a curve as the clip plays.

Crop/flip of the first frame can only ever produce axis-aligned
rectangles and a straight horizontal band boundary, so the later frames
are reachable for warp-based augmentation but not for crop/flip-only
augmentation.  That asymmetry is what the held-out benchmark measures.

Usage: python3 scripts/make_moving_square.py --out frames_dir
"""

import argparse
from pathlib import Path

import numpy as np
from PIL import Image


def make_frame(t: float, h: int = 64, w: int = 64, seed: int = 1234) -> np.ndarray:
    rng = np.random.default_rng(seed)  # same texture in every frame
    img = np.zeros((h, w, 3), np.float32)
    img[:] = (0.25, 0.35, 0.70)
    # The band boundary starts flat and bows downward mid-clip; a crop of
    # frame 0 always keeps it perfectly straight.
    cols = np.arange(w)
    boundary = h // 2 + 6.0 * np.sin(np.pi * cols / (w - 1)) * np.sin(np.pi * t)
    rows = np.arange(h)[:, None]
    img[rows >= boundary[None, :]] = (0.65, 0.55, 0.25)
    texture = rng.normal(0.0, 0.015, (h, w, 3)).astype(np.float32)

    # Height and width drift out of phase so the rectangle deforms over
    # the clip instead of just translating.
    size_r = int(round(18 + 4.0 * np.sin(2.0 * np.pi * t)))
    size_c = int(round(18 - 4.0 * np.sin(2.0 * np.pi * t)))
    r0 = int(round(8 + t * (h - 24 - 16)))
    c0 = int(round(8 + t * (w - 24 - 16)))
    img[r0 : r0 + size_r, c0 : c0 + size_c] = (0.15, 0.75, 0.30)
    # inner mark gives the rectangle an orientation
    img[r0 + 3 : r0 + 8, c0 + 3 : c0 + 8] = (0.9, 0.2, 0.2)
    return np.clip(img + texture, 0.0, 1.0)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", required=True)
    ap.add_argument("--frames", type=int, default=16)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.frames):
        t = i / (args.frames - 1)
        frame = make_frame(t)
        Image.fromarray(
            np.clip(np.rint(frame * 255.0), 0, 255).astype(np.uint8)
        ).save(out / f"frame_{i:05d}.png")
    print(f"wrote {args.frames} frames to {out}")


if __name__ == "__main__":
    main()

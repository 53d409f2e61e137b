import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from PIL import Image


def warpgen(*args):
    subprocess.run([sys.executable, "-m", "warpgen.cli", *map(str, args)],
                   check=True, capture_output=True, text=True)


def synthetic_image(h=64, w=64, seed=0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    img = np.zeros((h, w, 3), np.float32)
    img[:] = (0.2, 0.3, 0.7)
    img[h // 2 :] = (0.7, 0.6, 0.2)
    img[h // 3 : 2 * h // 3, w // 4 : w // 2] = (0.1, 0.8, 0.3)
    img += rng.normal(0, 0.01, img.shape).astype(np.float32)
    return np.clip(img, 0, 1)


@pytest.fixture(scope="session")
def dataset_dir(tmp_path_factory) -> Path:
    """Small augmented dataset built through the warpgen CLI."""
    tmp = tmp_path_factory.mktemp("fixture")
    img = synthetic_image()
    Image.fromarray(np.clip(np.rint(img * 255), 0, 255).astype(np.uint8)
                    ).save(tmp / "y.png")
    warpgen("extract-edges", "--image", tmp / "y.png", "--out", tmp / "x.png")
    warpgen("augment", "--image", tmp / "y.png", "--primitive", tmp / "x.png",
            "--n", "30", "--seed", "7", "--out", tmp / "ds")
    return tmp / "ds"

"""Pretrained-network-free image fidelity metrics: L1, PSNR, SSIM."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from warpgen.core import DimensionMismatch


class TooSmall(Exception):
    pass


@dataclass
class MetricReport:
    l1: float
    psnr: float
    ssim: float
    per_frame: list[dict] = field(default_factory=list)

    def to_json(self) -> str:
        doc = {"l1": self.l1, "psnr": self.psnr, "ssim": self.ssim}
        if self.per_frame:
            doc["per_frame"] = self.per_frame
        return json.dumps(doc, indent=2, sort_keys=True)


def _check_shapes(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")


def l1_distance(a: np.ndarray, b: np.ndarray) -> float:
    _check_shapes(a, b)
    return float(np.mean(np.abs(a.astype(np.float64) - b.astype(np.float64))))


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB with peak 1.0; inf for identical."""
    _check_shapes(a, b)
    mse = float(np.mean((a.astype(np.float64) - b.astype(np.float64)) ** 2))
    if mse == 0.0:
        return float("inf")
    return 10.0 * np.log10(1.0 / mse)


def _gaussian_window(size: int = 11, sigma: float = 1.5) -> np.ndarray:
    half = (size - 1) / 2
    x = np.arange(size) - half
    g = np.exp(-(x**2) / (2 * sigma**2))
    k = np.outer(g, g)
    return k / k.sum()


_SSIM_WINDOW = _gaussian_window()


def ssim(a: np.ndarray, b: np.ndarray, k1: float = 0.01, k2: float = 0.03) -> float:
    """Mean structural similarity, 11x11 Gaussian window (sigma 1.5),
    dynamic range 1.0, channels averaged. Local statistics are taken over
    fully-interior windows only ('valid' convolution)."""
    _check_shapes(a, b)
    if min(a.shape[0], a.shape[1]) < 11:
        raise TooSmall(f"need min dimension >= 11, got {a.shape[:2]}")
    c1 = k1**2
    c2 = k2**2
    vals = []
    for c in range(a.shape[2]):
        x = a[:, :, c].astype(np.float64)
        y = b[:, :, c].astype(np.float64)
        mu_x = signal.convolve2d(x, _SSIM_WINDOW, mode="valid")
        mu_y = signal.convolve2d(y, _SSIM_WINDOW, mode="valid")
        xx = signal.convolve2d(x * x, _SSIM_WINDOW, mode="valid") - mu_x**2
        yy = signal.convolve2d(y * y, _SSIM_WINDOW, mode="valid") - mu_y**2
        xy = signal.convolve2d(x * y, _SSIM_WINDOW, mode="valid") - mu_x * mu_y
        num = (2 * mu_x * mu_y + c1) * (2 * xy + c2)
        den = (mu_x**2 + mu_y**2 + c1) * (xx + yy + c2)
        vals.append(np.mean(num / den))
    return float(np.mean(vals))


def report(a: np.ndarray, b: np.ndarray) -> MetricReport:
    return MetricReport(l1=l1_distance(a, b), psnr=psnr(a, b), ssim=ssim(a, b))

"""Network and loss configuration."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


@dataclass(frozen=True)
class GeneratorSpec:
    input_channels: int = 1
    output_channels: int = 3
    base_width: int = 32
    num_downsamples: int = 3
    num_residual_blocks: int = 4

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorSpec":
        return cls(**d)


@dataclass(frozen=True)
class DiscriminatorSpec:
    input_channels: int = 4  # primitive channels + 3 image channels
    num_layers: int = 3
    base_width: int = 32
    num_scales: int = 1

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d: dict) -> "DiscriminatorSpec":
        return cls(**d)


class PerceptualBackend(Enum):
    PRETRAINED_FEATURES = "pretrained_features"
    MULTI_SCALE_PIXEL = "multi_scale_pixel"


@dataclass(frozen=True)
class LossConfig:
    alpha: float = 1.0
    perceptual_backend: PerceptualBackend = PerceptualBackend.MULTI_SCALE_PIXEL
    perceptual_layer_weights: tuple = (1.0, 1.0, 1.0)
    non_saturating: bool = False  # generator flavor of the adversarial term

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "perceptual_backend": self.perceptual_backend.value,
            "perceptual_layer_weights": list(self.perceptual_layer_weights),
            "non_saturating": self.non_saturating,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LossConfig":
        return cls(
            alpha=float(d.get("alpha", 1.0)),
            perceptual_backend=PerceptualBackend(
                d.get("perceptual_backend", "multi_scale_pixel")),
            perceptual_layer_weights=tuple(d.get("perceptual_layer_weights",
                                                 (1.0, 1.0, 1.0))),
            non_saturating=bool(d.get("non_saturating", False)),
        )

"""Small encoder/residual/decoder generator and patch-style conditional
discriminator. Spatial dims are preserved for inputs divisible by
2^num_downsamples."""

from __future__ import annotations

import torch
import torch.nn as nn

from pairtrainer.specs import DiscriminatorSpec, GeneratorSpec


class ChannelMismatch(Exception):
    pass


class ResidualBlock(nn.Module):
    def __init__(self, width: int):
        super().__init__()
        self.body = nn.Sequential(
            nn.Conv2d(width, width, 3, padding=1),
            nn.InstanceNorm2d(width),
            nn.ReLU(inplace=True),
            nn.Conv2d(width, width, 3, padding=1),
            nn.InstanceNorm2d(width),
        )

    def forward(self, x):
        return x + self.body(x)


class Generator(nn.Module):
    def __init__(self, spec: GeneratorSpec):
        super().__init__()
        self.spec = spec
        w = spec.base_width
        layers = [nn.Conv2d(spec.input_channels, w, 7, padding=3),
                  nn.ReLU(inplace=True)]
        for _ in range(spec.num_downsamples):
            layers += [nn.Conv2d(w, w * 2, 3, stride=2, padding=1),
                       nn.InstanceNorm2d(w * 2),
                       nn.ReLU(inplace=True)]
            w *= 2
        layers += [ResidualBlock(w) for _ in range(spec.num_residual_blocks)]
        for _ in range(spec.num_downsamples):
            layers += [nn.ConvTranspose2d(w, w // 2, 4, stride=2, padding=1),
                       nn.InstanceNorm2d(w // 2),
                       nn.ReLU(inplace=True)]
            w //= 2
        layers += [nn.Conv2d(w, spec.output_channels, 7, padding=3),
                   nn.Sigmoid()]  # bounded output in [0, 1]
        self.body = nn.Sequential(*layers)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.shape[1] != self.spec.input_channels:
            raise ChannelMismatch(
                f"expected {self.spec.input_channels} channels, got {x.shape[1]}")
        return self.body(x)


class Discriminator(nn.Module):
    """Scores a channel-concatenated (primitive, image) pair; returns the
    probability of the pair being a ground-truth pair."""

    def __init__(self, spec: DiscriminatorSpec):
        super().__init__()
        self.spec = spec
        w = spec.base_width
        layers = [nn.Conv2d(spec.input_channels, w, 4, stride=2, padding=1),
                  nn.LeakyReLU(0.2, inplace=True)]
        for _ in range(spec.num_layers - 1):
            layers += [nn.Conv2d(w, w * 2, 4, stride=2, padding=1),
                       nn.InstanceNorm2d(w * 2),
                       nn.LeakyReLU(0.2, inplace=True)]
            w *= 2
        layers += [nn.Conv2d(w, 1, 4, padding=1)]  # patch logits
        self.body = nn.Sequential(*layers)

    def forward(self, primitive: torch.Tensor, image: torch.Tensor) -> torch.Tensor:
        pair = torch.cat([primitive, image], dim=1)
        if pair.shape[1] != self.spec.input_channels:
            raise ChannelMismatch(
                f"expected {self.spec.input_channels} pair channels, got {pair.shape[1]}")
        logits = self.body(pair)
        return torch.sigmoid(logits.mean(dim=(1, 2, 3)))

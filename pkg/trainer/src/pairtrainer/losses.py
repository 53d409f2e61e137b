"""Reconstruction, adversarial, and combined training objectives.

Sign conventions: the discriminator maximizes
log D(x,y) + log(1 - D(x,G(x))); the generator minimizes its fake term
log(1 - D(x,G(x))) by default (non-saturating -log D(x,G(x)) behind a
config flag). The combined objective is rec + alpha * adv.
"""

from __future__ import annotations

import torch
import torch.nn.functional as F

from pairtrainer.specs import LossConfig, PerceptualBackend

PROB_EPS = 1e-7


class DimensionMismatch(Exception):
    pass


class MissingWeights(Exception):
    pass


def multi_scale_l1(gen_img: torch.Tensor, target: torch.Tensor,
                   scales: int = 3) -> torch.Tensor:
    """Mean absolute difference averaged over dyadic downscales."""
    if gen_img.shape != target.shape:
        raise DimensionMismatch(f"{tuple(gen_img.shape)} vs {tuple(target.shape)}")
    total = gen_img.new_zeros(())
    a, b = gen_img, target
    for s in range(scales):
        total = total + (a - b).abs().mean()
        if s < scales - 1:
            a = F.avg_pool2d(a, 2)
            b = F.avg_pool2d(b, 2)
    return total / scales


_VGG_SLICES = None


def _pretrained_features(img: torch.Tensor) -> list[torch.Tensor]:
    global _VGG_SLICES
    if _VGG_SLICES is None:
        try:
            from torchvision.models import VGG19_Weights, vgg19
            feats = vgg19(weights=VGG19_Weights.IMAGENET1K_V1).features.eval()
        except Exception as e:
            raise MissingWeights(f"pretrained VGG weights unavailable: {e}") from e
        cuts = (4, 9, 18)
        _VGG_SLICES = [feats[a:b] for a, b in zip((0,) + cuts[:-1], cuts)]
        for s in _VGG_SLICES:
            for p in s.parameters():
                p.requires_grad_(False)
    outs = []
    x = img if img.shape[1] == 3 else img.repeat(1, 3, 1, 1)
    for s in _VGG_SLICES:
        x = s(x)
        outs.append(x)
    return outs


def reconstruction_loss(gen_img: torch.Tensor, target: torch.Tensor,
                        cfg: LossConfig) -> torch.Tensor:
    if gen_img.shape != target.shape:
        raise DimensionMismatch(f"{tuple(gen_img.shape)} vs {tuple(target.shape)}")
    if cfg.perceptual_backend is PerceptualBackend.MULTI_SCALE_PIXEL:
        return multi_scale_l1(gen_img, target,
                              scales=len(cfg.perceptual_layer_weights))
    fa = _pretrained_features(gen_img)
    fb = _pretrained_features(target)
    weights = cfg.perceptual_layer_weights
    total = gen_img.new_zeros(())
    for w, a, b in zip(weights, fa, fb):
        total = total + w * (a - b).abs().mean()
    return total / sum(weights)


def _as_prob(p) -> torch.Tensor:
    # plain Python numbers are promoted to float64 so scalar loss
    # arithmetic is exact to well below 1e-9
    t = p if torch.is_tensor(p) else torch.tensor(float(p), dtype=torch.float64)
    return torch.clamp(t, PROB_EPS, 1.0 - PROB_EPS)


def adversarial_loss(d_real: torch.Tensor, d_fake: torch.Tensor) -> torch.Tensor:
    """log(d_real) + log(1 - d_fake), probabilities clamped at 1e-7."""
    return torch.log(_as_prob(d_real)) + torch.log(1.0 - _as_prob(d_fake))


def generator_adversarial_term(d_fake: torch.Tensor,
                               non_saturating: bool = False) -> torch.Tensor:
    d_fake = _as_prob(d_fake)
    if non_saturating:
        return -torch.log(d_fake)
    return torch.log(1.0 - d_fake)


def total_loss(rec, adv, cfg: LossConfig):
    return rec + cfg.alpha * adv

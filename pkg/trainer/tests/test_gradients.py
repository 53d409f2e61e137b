"""Finite-difference validation of the training gradients.

Autograd gradients of the full generator objective (multi-scale pixel
reconstruction plus the adversarial term through a small discriminator)
are compared against central finite differences in float64 on a tiny
input.
"""

import numpy as np
import pytest
import torch

from pairtrainer.losses import (LossConfig, generator_adversarial_term,
                                reconstruction_loss, total_loss)
from pairtrainer.models import Discriminator, Generator
from pairtrainer.specs import DiscriminatorSpec, GeneratorSpec, PerceptualBackend

REL_TOL = 1e-4


def _objective(gen, disc, prim, target, cfg):
    fake = gen(prim)
    rec = reconstruction_loss(fake, target, cfg)
    adv = generator_adversarial_term(disc(prim, fake), cfg)
    return total_loss(rec, adv, cfg)


def _rel_err(analytic: np.ndarray, numeric: np.ndarray) -> float:
    denom = max(np.linalg.norm(analytic), np.linalg.norm(numeric), 1e-12)
    return float(np.linalg.norm(analytic - numeric) / denom)


@pytest.mark.parametrize("non_saturating", [False, True])
def test_generator_gradient_matches_finite_differences(non_saturating):
    torch.manual_seed(0)
    cfg = LossConfig(alpha=0.5,
                     perceptual_backend=PerceptualBackend.MULTI_SCALE_PIXEL,
                     non_saturating=non_saturating)
    gen = Generator(GeneratorSpec(input_channels=2, base_width=4,
                                  num_downsamples=1, num_residual_blocks=1))
    disc = Discriminator(DiscriminatorSpec(input_channels=5, num_layers=1,
                                           base_width=4))
    gen.double()
    disc.double()
    prim = torch.rand(1, 2, 8, 8, dtype=torch.float64)
    target = torch.rand(1, 3, 8, 8, dtype=torch.float64)

    loss = _objective(gen, disc, prim, target, cfg)
    grads = torch.autograd.grad(loss, list(gen.parameters()))

    rng = np.random.default_rng(7)
    eps = 1e-6
    analytic, numeric = [], []
    for param, grad in zip(gen.parameters(), grads):
        flat = param.data.view(-1)
        gflat = grad.view(-1)
        idx = rng.choice(flat.numel(), size=min(4, flat.numel()), replace=False)
        for i in idx:
            orig = flat[i].item()
            flat[i] = orig + eps
            hi = _objective(gen, disc, prim, target, cfg).item()
            flat[i] = orig - eps
            lo = _objective(gen, disc, prim, target, cfg).item()
            flat[i] = orig
            analytic.append(gflat[i].item())
            numeric.append((hi - lo) / (2.0 * eps))
    assert len(analytic) >= 20
    assert _rel_err(np.array(analytic), np.array(numeric)) <= REL_TOL


def test_discriminator_gradient_matches_finite_differences():
    torch.manual_seed(1)
    from pairtrainer.losses import adversarial_loss

    disc = Discriminator(DiscriminatorSpec(input_channels=4, num_layers=1,
                                           base_width=4))
    disc.double()
    prim = torch.rand(1, 1, 8, 8, dtype=torch.float64)
    real = torch.rand(1, 3, 8, 8, dtype=torch.float64)
    fake = torch.rand(1, 3, 8, 8, dtype=torch.float64)

    def objective():
        return adversarial_loss(disc(prim, real), disc(prim, fake))

    loss = objective()
    grads = torch.autograd.grad(loss, list(disc.parameters()))

    rng = np.random.default_rng(3)
    eps = 1e-6
    analytic, numeric = [], []
    for param, grad in zip(disc.parameters(), grads):
        flat = param.data.view(-1)
        gflat = grad.view(-1)
        idx = rng.choice(flat.numel(), size=min(4, flat.numel()), replace=False)
        for i in idx:
            orig = flat[i].item()
            flat[i] = orig + eps
            hi = objective().item()
            flat[i] = orig - eps
            lo = objective().item()
            flat[i] = orig
            analytic.append(gflat[i].item())
            numeric.append((hi - lo) / (2.0 * eps))
    assert _rel_err(np.array(analytic), np.array(numeric)) <= REL_TOL

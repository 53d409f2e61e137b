"""Alternating single-pair adversarial training and inference."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from pairtrainer.data import SourceUnreachable  # re-exported for callers
from pairtrainer.losses import (
    adversarial_loss,
    generator_adversarial_term,
    reconstruction_loss,
)
from pairtrainer.models import ChannelMismatch, Discriminator, Generator
from pairtrainer.specs import DiscriminatorSpec, GeneratorSpec, LossConfig

LEARNING_RATE = 2e-4
ADAM_BETAS = (0.5, 0.999)
CHECKPOINT_EVERY = 1000


class NonFiniteLoss(Exception):
    pass


@dataclass
class TrainState:
    generator: Generator
    discriminator: Discriminator
    gen_spec: GeneratorSpec
    disc_spec: DiscriminatorSpec
    loss_cfg: LossConfig
    iteration: int = 0
    seed: int = 0
    loss_history: list[dict] = field(default_factory=list)
    opt_g_state: dict | None = None
    opt_d_state: dict | None = None

    def save(self, path) -> None:
        torch.save({
            "gen_spec": self.gen_spec.to_dict(),
            "disc_spec": self.disc_spec.to_dict(),
            "loss_cfg": self.loss_cfg.to_dict(),
            "iteration": self.iteration,
            "seed": self.seed,
            "loss_history": self.loss_history,
            "generator": self.generator.state_dict(),
            "discriminator": self.discriminator.state_dict(),
            "opt_g": self.opt_g_state,
            "opt_d": self.opt_d_state,
        }, path)

    @classmethod
    def load(cls, path) -> "TrainState":
        doc = torch.load(path, map_location="cpu", weights_only=False)
        gen_spec = GeneratorSpec.from_dict(doc["gen_spec"])
        disc_spec = DiscriminatorSpec.from_dict(doc["disc_spec"])
        gen = Generator(gen_spec)
        gen.load_state_dict(doc["generator"])
        disc = Discriminator(disc_spec)
        disc.load_state_dict(doc["discriminator"])
        return cls(
            generator=gen, discriminator=disc,
            gen_spec=gen_spec, disc_spec=disc_spec,
            loss_cfg=LossConfig.from_dict(doc["loss_cfg"]),
            iteration=doc["iteration"], seed=doc["seed"],
            loss_history=doc["loss_history"],
            opt_g_state=doc.get("opt_g"), opt_d_state=doc.get("opt_d"),
        )


def _to_batch(arr: np.ndarray) -> torch.Tensor:
    return torch.from_numpy(np.ascontiguousarray(arr)).permute(2, 0, 1)[None]


def init_state(gen_spec: GeneratorSpec, disc_spec: DiscriminatorSpec,
               loss_cfg: LossConfig, seed: int) -> TrainState:
    torch.manual_seed(seed)
    return TrainState(
        generator=Generator(gen_spec),
        discriminator=Discriminator(disc_spec),
        gen_spec=gen_spec, disc_spec=disc_spec,
        loss_cfg=loss_cfg, seed=seed,
    )


def train(pair_source, gen_spec: GeneratorSpec, disc_spec: DiscriminatorSpec,
          loss_cfg: LossConfig, iterations: int, seed: int = 0,
          out_dir=None, state: TrainState | None = None,
          log_every: int = 0) -> TrainState:
    """Alternating D/G updates, one augmented pair per iteration."""
    if state is None:
        state = init_state(gen_spec, disc_spec, loss_cfg, seed)
    gen, disc = state.generator, state.discriminator
    opt_g = torch.optim.Adam(gen.parameters(), lr=LEARNING_RATE, betas=ADAM_BETAS)
    opt_d = torch.optim.Adam(disc.parameters(), lr=LEARNING_RATE, betas=ADAM_BETAS)
    if state.opt_g_state:
        opt_g.load_state_dict(state.opt_g_state)
    if state.opt_d_state:
        opt_d.load_state_dict(state.opt_d_state)
    out_dir = Path(out_dir) if out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)

    for step in range(iterations):
        prim_arr, img_arr = pair_source.get(state.iteration)
        x = _to_batch(prim_arr)
        y = _to_batch(img_arr)

        # discriminator: maximize log D(x,y) + log(1 - D(x,G(x)))
        with torch.no_grad():
            fake = gen(x)
        d_loss = -adversarial_loss(disc(x, y), disc(x, fake)).mean()
        opt_d.zero_grad()
        d_loss.backward()
        opt_d.step()

        # generator: minimize rec + alpha * (its adversarial term)
        fake = gen(x)
        rec = reconstruction_loss(fake, y, loss_cfg)
        adv_g = generator_adversarial_term(disc(x, fake),
                                           loss_cfg.non_saturating).mean()
        g_loss = rec + loss_cfg.alpha * adv_g
        if not (torch.isfinite(g_loss) and torch.isfinite(d_loss)):
            raise NonFiniteLoss(
                f"iteration {state.iteration}: g={g_loss.item()}, d={d_loss.item()}")
        opt_g.zero_grad()
        g_loss.backward()
        opt_g.step()

        state.iteration += 1
        state.loss_history.append({
            "iteration": state.iteration,
            "rec": float(rec.item()),
            "adv_g": float(adv_g.item()),
            "d": float(d_loss.item()),
        })
        if log_every and state.iteration % log_every == 0:
            print(f"iter {state.iteration:6d}  rec={rec.item():.4f} "
                  f"adv_g={adv_g.item():.4f} d={d_loss.item():.4f}")
        if out_dir and state.iteration % CHECKPOINT_EVERY == 0:
            state.opt_g_state = opt_g.state_dict()
            state.opt_d_state = opt_d.state_dict()
            state.save(out_dir / f"ckpt_{state.iteration:06d}.pt")

    state.opt_g_state = opt_g.state_dict()
    state.opt_d_state = opt_d.state_dict()
    if out_dir:
        state.save(out_dir / "ckpt_final.pt")
        (out_dir / "loss_history.json").write_text(
            json.dumps(state.loss_history) + "\n")
    return state


@torch.no_grad()
def infer(state: TrainState, primitive: np.ndarray) -> np.ndarray:
    """One deterministic forward pass; output HxWx3 floats in [0, 1]."""
    if primitive.shape[2] != state.gen_spec.input_channels:
        raise ChannelMismatch(
            f"primitive has {primitive.shape[2]} channels, "
            f"generator expects {state.gen_spec.input_channels}")
    state.generator.eval()
    out = state.generator(_to_batch(primitive))
    state.generator.train()
    return out[0].permute(1, 2, 0).numpy()

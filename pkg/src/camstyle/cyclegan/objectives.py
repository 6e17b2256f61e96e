"""The four translation-training loss terms and their weighted combination.

Adversarial terms use the least-squares form (real scores regressed to 1,
fakes to 0), with the discriminator's sum halved as in the standard training
recipe. Cycle and identity terms are mean absolute error.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn as nn

from camstyle.cyclegan.config import CycleGANConfig

SIDES = ("generator", "discriminator")


@dataclass
class PairNets:
    """Training-time bundle: the two generators plus their discriminators."""

    g_ab: nn.Module
    g_ba: nn.Module
    d_a: nn.Module
    d_b: nn.Module


def adversarial_loss(scores_real: torch.Tensor | None, scores_fake: torch.Tensor,
                     side: str) -> torch.Tensor:
    """Least-squares adversarial objective for one side of the game.

    generator:     mean((scores_fake - 1)^2)
    discriminator: 0.5 * (mean((scores_real - 1)^2) + mean(scores_fake^2))
    """
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")
    if scores_fake.numel() == 0:
        raise ValueError("empty score grid")
    if side == "generator":
        return ((scores_fake - 1.0) ** 2).mean()
    if scores_real is None or scores_real.numel() == 0:
        raise ValueError("discriminator side needs real scores")
    return 0.5 * (((scores_real - 1.0) ** 2).mean() + (scores_fake ** 2).mean())


def cycle_consistency_loss(x: torch.Tensor, x_reconstructed: torch.Tensor) -> torch.Tensor:
    """Mean absolute reconstruction error after a full a->b->a cycle."""
    if x.shape != x_reconstructed.shape:
        raise ValueError(f"shape mismatch: {tuple(x.shape)} vs {tuple(x_reconstructed.shape)}")
    return (x - x_reconstructed).abs().mean()


def identity_mapping_loss(model_output_on_target: torch.Tensor,
                          target: torch.Tensor) -> torch.Tensor:
    """Mean absolute deviation of a generator from identity on its own domain."""
    if model_output_on_target.shape != target.shape:
        raise ValueError(
            f"shape mismatch: {tuple(model_output_on_target.shape)} vs {tuple(target.shape)}")
    return (model_output_on_target - target).abs().mean()


def total_objective(batch_a: torch.Tensor, batch_b: torch.Tensor, nets: PairNets,
                    config: CycleGANConfig) -> dict[str, torch.Tensor]:
    """Generator-side objective with named components.

    total = adv_g + adv_f + lambda_cyc*(cyc_a + cyc_b)
          + lambda_identity*(id_a + id_b)

    Components are returned unweighted so logs can decompose the total
    exactly.
    """
    fake_b = nets.g_ab(batch_a)
    fake_a = nets.g_ba(batch_b)
    rec_a = nets.g_ba(fake_b)
    rec_b = nets.g_ab(fake_a)

    parts = {
        "adv_g": adversarial_loss(None, nets.d_b(fake_b), "generator"),
        "adv_f": adversarial_loss(None, nets.d_a(fake_a), "generator"),
        "cyc_a": cycle_consistency_loss(batch_a, rec_a),
        "cyc_b": cycle_consistency_loss(batch_b, rec_b),
        "id_a": identity_mapping_loss(nets.g_ba(batch_a), batch_a),
        "id_b": identity_mapping_loss(nets.g_ab(batch_b), batch_b),
    }
    parts["total"] = (parts["adv_g"] + parts["adv_f"]
                      + config.lambda_cyc * (parts["cyc_a"] + parts["cyc_b"])
                      + config.lambda_identity * (parts["id_a"] + parts["id_b"]))
    return parts

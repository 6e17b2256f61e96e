"""Supervision math: label distributions, cross-entropy, LSR, mixed-batch loss.

These are the canonical scalar/vector formulations in float64. The batched
torch criterion used inside training (`camstyle.reid.train.MixedBatchCriterion`)
computes the same quantities and is tested for agreement with these.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

# Predictions are floored at this value inside the loss (never inside the
# model) so log() stays finite while the model output remains honest.
PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class LossConfig:
    """Smoothing per sample origin; epsilon 0 means plain cross-entropy.

    Defaults: one-hot cross-entropy on real images, LSR(0.1) on fakes.
    ``eps_real`` > 0 reproduces the LSR-on-real ablation rows.
    """

    eps_real: float = 0.0
    eps_fake: float = 0.1

    def __post_init__(self) -> None:
        for name, eps in (("eps_real", self.eps_real), ("eps_fake", self.eps_fake)):
            if not 0.0 <= eps <= 1.0:
                raise ValueError(f"{name} must be in [0,1], got {eps}")


def one_hot(label: int, num_classes: int) -> np.ndarray:
    """Length-C distribution with all mass on ``label``."""
    if not 0 <= label < num_classes:
        raise ValueError(f"label {label} out of range [0, {num_classes})")
    q = np.zeros(num_classes, dtype=np.float64)
    q[label] = 1.0
    return q


def lsr_distribution(label: int, num_classes: int, epsilon: float) -> np.ndarray:
    """Smoothed target: 1 - eps + eps/C on the true class, eps/C elsewhere."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must be in [0,1], got {epsilon}")
    if not 0 <= label < num_classes:
        raise ValueError(f"label {label} out of range [0, {num_classes})")
    q = np.full(num_classes, epsilon / num_classes, dtype=np.float64)
    q[label] = 1.0 - epsilon + epsilon / num_classes
    return q


def cross_entropy(pred: Sequence[float] | np.ndarray,
                  target: Sequence[float] | np.ndarray) -> float:
    """-sum_c target(c) * log(pred(c)), with pred floored at PROB_FLOOR."""
    p = np.asarray(pred, dtype=np.float64)
    q = np.asarray(target, dtype=np.float64)
    if p.shape != q.shape or p.ndim != 1:
        raise ValueError(f"prediction/target shape mismatch: {p.shape} vs {q.shape}")
    logp = np.log(np.maximum(p, PROB_FLOOR))
    return float(-(q * logp).sum())


def lsr_loss(pred: Sequence[float] | np.ndarray, label: int, epsilon: float,
             num_classes: int | None = None) -> float:
    """-(1-eps) log p(y) - (eps/C) sum_c log p(c).

    Algebraically identical to ``cross_entropy(pred, lsr_distribution(...))``;
    both forms are kept and the equivalence is under test.
    """
    p = np.asarray(pred, dtype=np.float64)
    if p.ndim != 1:
        raise ValueError(f"prediction must be a vector, got shape {p.shape}")
    c = p.shape[0] if num_classes is None else num_classes
    if c != p.shape[0]:
        raise ValueError(f"num_classes {c} does not match prediction length {p.shape[0]}")
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must be in [0,1], got {epsilon}")
    if not 0 <= label < c:
        raise ValueError(f"label {label} out of range [0, {c})")
    logp = np.log(np.maximum(p, PROB_FLOOR))
    return float(-(1.0 - epsilon) * logp[label] - (epsilon / c) * logp.sum())


def mixed_batch_loss(real_losses: Sequence[float],
                     fake_losses: Sequence[float] = ()) -> float:
    """Mean of the real losses plus mean of the fake losses.

    The fake term is defined as 0 when no fakes are drawn, so the baseline
    (real-only) configuration uses the same code path.
    """
    real = np.asarray(real_losses, dtype=np.float64)
    fake = np.asarray(fake_losses, dtype=np.float64)
    if real.size == 0:
        raise ValueError("mixed batch needs at least one real loss (M >= 1)")
    total = float(real.mean())
    if fake.size:
        total += float(fake.mean())
    return total


def softmax(scores: Sequence[float] | np.ndarray) -> np.ndarray:
    """Numerically stable normalized exponential of a score vector."""
    s = np.asarray(scores, dtype=np.float64)
    s = s - s.max()
    e = np.exp(s)
    return e / e.sum()

"""Mini-batch composition with a real:fake ratio and per-epoch fake subsampling.

Each epoch uses every real image exactly once and a freshly drawn
``(N/M) * 1/(L-1)`` fraction of the fake pool, arranged into batches holding
``batch_size * M/(M+N)`` reals and ``batch_size * N/(M+N)`` fakes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class BatchSpec:
    batch_size: int = 128
    ratio_real: int = 3
    ratio_fake: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.ratio_real < 1:
            raise ValueError("ratio_real (M) must be >= 1")
        if self.ratio_fake < 0:
            raise ValueError("ratio_fake (N) must be >= 0")


@dataclass(frozen=True)
class Batch:
    """Index batch: positions into the real pool and the fake pool."""

    real_indices: tuple[int, ...]
    fake_indices: tuple[int, ...]
    partial: bool = False

    @property
    def size(self) -> int:
        return len(self.real_indices) + len(self.fake_indices)


def batch_quota(spec: BatchSpec) -> tuple[int, int]:
    """(reals, fakes) per full batch; largest-remainder when M+N does not divide."""
    total = spec.ratio_real + spec.ratio_fake
    ideal_real = Fraction(spec.batch_size * spec.ratio_real, total)
    m = math.floor(ideal_real)
    n = spec.batch_size - m
    # one leftover slot at most; give it to the side with the larger remainder
    if ideal_real - m > Fraction(1, 2):
        m += 1
        n -= 1
    return m, n


def _cumulative_real_quota(batch_index: int, spec: BatchSpec) -> int:
    """Real slots allotted through the first ``batch_index`` full batches.

    Round-half-up on the exact cumulative target keeps the epoch-level ratio
    within half a slot of M:(M+N) even when batch_size splits unevenly.
    """
    total = spec.ratio_real + spec.ratio_fake
    target = Fraction(batch_index * spec.batch_size * spec.ratio_real, total)
    return math.floor(target + Fraction(1, 2))


def compose_batch(real_pool: Sequence, fake_pool: Sequence, spec: BatchSpec,
                  rng: np.random.Generator) -> tuple[Batch, np.random.Generator]:
    """Draw one batch of m reals and n fakes uniformly without replacement."""
    m, n = batch_quota(spec)
    if len(real_pool) < m:
        raise ValueError(f"real pool has {len(real_pool)} items, batch needs {m}")
    if n > 0 and len(fake_pool) == 0:
        raise ValueError("fake pool is empty but the batch ratio requests fakes")
    if n > 0 and len(fake_pool) < n:
        raise ValueError(f"fake pool has {len(fake_pool)} items, batch needs {n}")
    real_idx = rng.choice(len(real_pool), size=m, replace=False)
    fake_idx = rng.choice(len(fake_pool), size=n, replace=False) if n else np.empty(0, dtype=int)
    batch = Batch(real_indices=tuple(int(i) for i in real_idx),
                  fake_indices=tuple(int(i) for i in fake_idx))
    return batch, rng


def epoch_fake_fraction(ratio_real: int, ratio_fake: int, num_cameras: int) -> float:
    """Fraction of the fake pool consumed per epoch: (N/M) * 1/(L-1)."""
    if ratio_real < 1:
        raise ValueError("ratio_real (M) must be >= 1")
    if ratio_fake < 0:
        raise ValueError("ratio_fake (N) must be >= 0")
    if num_cameras < 2:
        raise ValueError("num_cameras (L) must be >= 2")
    return (ratio_fake / ratio_real) * (1.0 / (num_cameras - 1))


@dataclass(frozen=True)
class EpochPlan:
    batches: tuple[Batch, ...]
    num_reals: int
    num_fakes: int

    @property
    def num_full_batches(self) -> int:
        return sum(1 for b in self.batches if not b.partial)


def epoch_plan(real_count: int, fake_count: int, spec: BatchSpec, num_cameras: int,
               epoch: int = 0, freeze_fake_subset: bool = False) -> EpochPlan:
    """Plan one epoch: every real index once, a fresh fake subsample, ratioed batches.

    Deterministic given (spec.seed, epoch). ``freeze_fake_subset`` pins the
    fake subsample to the epoch-0 draw while batch order still reshuffles.
    """
    if real_count < 1:
        raise ValueError("epoch needs at least one real image")
    frac = epoch_fake_fraction(spec.ratio_real, spec.ratio_fake, num_cameras)
    n_fake = math.ceil(fake_count * frac) if fake_count > 0 else 0
    if spec.ratio_fake > 0 and fake_count == 0:
        raise ValueError("fake pool is empty but the batch ratio requests fakes")

    rng = np.random.default_rng(np.random.SeedSequence([spec.seed, epoch]))
    real_order = rng.permutation(real_count)
    if freeze_fake_subset:
        subset_rng = np.random.default_rng(np.random.SeedSequence([spec.seed, 0]))
        fake_subset = subset_rng.choice(fake_count, size=n_fake, replace=False) if n_fake else np.empty(0, dtype=int)
        fake_order = rng.permutation(fake_subset)
    else:
        fake_order = rng.choice(fake_count, size=n_fake, replace=False) if n_fake else np.empty(0, dtype=int)

    batches: list[Batch] = []
    used_real = used_fake = 0
    b = 0
    while True:
        b += 1
        m_b = _cumulative_real_quota(b, spec) - _cumulative_real_quota(b - 1, spec)
        n_b = spec.batch_size - m_b
        if used_real + m_b > real_count or used_fake + n_b > n_fake:
            break
        batches.append(Batch(
            real_indices=tuple(int(i) for i in real_order[used_real:used_real + m_b]),
            fake_indices=tuple(int(i) for i in fake_order[used_fake:used_fake + n_b]),
        ))
        used_real += m_b
        used_fake += n_b
    # leftovers (undersized or off-ratio once one pool runs dry) become
    # flagged partial batches of at most batch_size
    rem_real = real_order[used_real:]
    rem_fake = fake_order[used_fake:]
    pos_r = pos_f = 0
    while pos_r < len(rem_real) or pos_f < len(rem_fake):
        take_r = min(spec.batch_size, len(rem_real) - pos_r)
        take_f = min(spec.batch_size - take_r, len(rem_fake) - pos_f)
        batches.append(Batch(
            real_indices=tuple(int(i) for i in rem_real[pos_r:pos_r + take_r]),
            fake_indices=tuple(int(i) for i in rem_fake[pos_f:pos_f + take_f]),
            partial=True,
        ))
        pos_r += take_r
        pos_f += take_f
    return EpochPlan(batches=tuple(batches), num_reals=real_count, num_fakes=n_fake)

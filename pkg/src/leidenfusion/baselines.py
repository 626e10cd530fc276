"""Comparison partitioners: synchronous label propagation and uniform random."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .partition import Partition


@dataclass(frozen=True)
class LpaConfig:
    k: int
    max_iters: int = 100
    seed: int | None = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


def lpa_sweep(g: Graph, labels: np.ndarray, k: int) -> np.ndarray:
    """One synchronous update: every node takes the most frequent label among
    its neighbours (smallest label on ties); nodes without neighbours keep
    their label."""
    src = np.repeat(np.arange(g.n, dtype=np.int64), g.degrees)
    counts = np.bincount(src * k + labels[g.indices], minlength=g.n * k).reshape(g.n, k)
    new = counts.argmax(axis=1)
    lonely = g.degrees == 0
    new[lonely] = labels[lonely]
    return new


def lpa_partition(g: Graph, cfg: LpaConfig) -> Partition:
    """Label propagation into at most ``cfg.k`` blocks.

    Labels start uniformly at random. Sweeps stop at a fixpoint or after
    ``cfg.max_iters`` sweeps. Blocks that lose every node stay empty, so the
    result can have fewer non-empty blocks than ``cfg.k``.
    """
    if g.n == 0:
        raise ValueError("graph has no nodes")
    rng = np.random.default_rng(cfg.seed)
    labels = rng.integers(0, cfg.k, size=g.n, dtype=np.int64)
    for _ in range(cfg.max_iters):
        new = lpa_sweep(g, labels, cfg.k)
        if np.array_equal(new, labels):
            break
        labels = new
    return Partition(labels, cfg.k)


def random_partition(g: Graph, k: int, seed: int | None = 0) -> Partition:
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = np.random.default_rng(seed)
    return Partition(rng.integers(0, k, size=g.n, dtype=np.int64), k)

"""Greedy community fusion: repeatedly merge the smallest community into the
neighbour it shares the most edges with, until ``k`` blocks remain."""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .graph import DisconnectedGraphError, Graph, block_components, is_connected
from .leiden import LeidenConfig, leiden_communities
from .partition import Partition

log = logging.getLogger(__name__)


class FusionError(ValueError):
    """Fusion cannot produce the requested number of connected blocks."""


class InsufficientCommunitiesError(FusionError):
    pass


class DisconnectedBlockError(FusionError):
    pass


@dataclass(frozen=True)
class FusionConfig:
    k: int
    alpha: float = 0.05
    beta: float = 0.5
    seed: int | None = 0
    resolution: float = 1.0
    max_passes: int = 10

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if not 0 < self.beta <= 1:
            raise ValueError("beta must be in (0, 1]")


def _exact(x: float) -> Fraction:
    # 0.05 should mean 1/20, not the nearest binary double
    return Fraction(str(x))


def max_part_size(n: int, k: int, alpha: float) -> int:
    """``ceil(n / k * (1 + alpha))``, evaluated in exact arithmetic."""
    return math.ceil(Fraction(n, k) * (1 + _exact(alpha)))


def community_size_cap(n: int, k: int, alpha: float, beta: float) -> int:
    """Leiden size cap ``ceil(beta * max_part_size)``."""
    return max(1, math.ceil(_exact(beta) * max_part_size(n, k, alpha)))


class CutState:
    """Community sizes and pairwise cut counts, maintained across merges.

    ``cut(i, j)`` is the number of graph edges between active communities
    ``i`` and ``j``. The smallest active community is served from a heap keyed
    on ``(size, id)``; entries go stale on merge and are skipped lazily.
    """

    def __init__(self, sizes, cuts: list[dict[int, int]]):
        self.sizes = list(sizes)
        self.cuts = cuts
        self.active = {c for c, s in enumerate(self.sizes) if s > 0}
        self._heap = [(self.sizes[c], c) for c in sorted(self.active)]
        heapq.heapify(self._heap)

    @classmethod
    def from_partition(cls, g: Graph, p: Partition) -> "CutState":
        lab = p.labels
        u, v = g.edge_arrays()
        a, b = lab[u], lab[v]
        cross = a != b
        lo = np.minimum(a[cross], b[cross])
        hi = np.maximum(a[cross], b[cross])
        pairs, counts = np.unique(lo * p.block_count + hi, return_counts=True)
        cuts: list[dict[int, int]] = [{} for _ in range(p.block_count)]
        for key, w in zip(pairs.tolist(), counts.tolist()):
            i, j = divmod(key, p.block_count)
            cuts[i][j] = w
            cuts[j][i] = w
        return cls(p.sizes.tolist(), cuts)

    def __len__(self):
        return len(self.active)

    def size(self, c: int) -> int:
        return self.sizes[c]

    def cut(self, i: int, j: int) -> int:
        if i == j:
            raise ValueError("cut of a community with itself is undefined")
        return self.cuts[i].get(j, 0)

    def neighbors(self, c: int) -> set[int]:
        if c not in self.active:
            raise KeyError(f"community {c} is not active")
        return set(self.cuts[c])

    def smallest(self) -> int:
        heap = self._heap
        while heap:
            size, c = heap[0]
            if c in self.active and self.sizes[c] == size:
                return c
            heapq.heappop(heap)
        raise ValueError("no active communities")

    def merge(self, a: int, b: int) -> int:
        """Merge two active communities; the lower id survives and is returned."""
        if a == b or a not in self.active or b not in self.active:
            raise KeyError("merge needs two distinct active communities")
        keep, gone = min(a, b), max(a, b)
        kc = self.cuts[keep]
        for nb, w in self.cuts[gone].items():
            nbc = self.cuts[nb]
            del nbc[gone]
            if nb == keep:
                continue
            kc[nb] = kc.get(nb, 0) + w
            nbc[keep] = nbc.get(keep, 0) + w
        self.cuts[gone] = {}
        self.sizes[keep] += self.sizes[gone]
        self.sizes[gone] = 0
        self.active.discard(gone)
        heapq.heappush(self._heap, (self.sizes[keep], keep))
        return keep


def largest_edge_cut_neighbor(state: CutState, v: int, max_part_size: int) -> int:
    """Neighbour of ``v`` to merge into.

    Among neighbours whose merged size stays strictly below ``max_part_size``,
    the one sharing the most edges with ``v``; if none fits, the smallest
    neighbour. Ties go to the lower id.
    """
    nbrs = state.cuts[v]
    if v not in state.active:
        raise KeyError(f"community {v} is not active")
    if not nbrs:
        raise DisconnectedGraphError(f"community {v} has no neighbours; is the graph connected?")
    sv = state.sizes[v]
    fitting = [(-w, c) for c, w in nbrs.items() if state.sizes[c] + sv < max_part_size]
    if fitting:
        return min(fitting)[1]
    return min((state.sizes[c], c) for c in nbrs)[1]


def _relabel_active(labels: np.ndarray, n_blocks: int, find) -> Partition:
    root = np.array([find(c) for c in range(n_blocks)], dtype=np.int64)
    merged = root[labels]
    _, first, inverse = np.unique(merged, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first)] = np.arange(len(first))
    return Partition(rank[inverse])


def fuse(g: Graph, initial: Partition, cfg: FusionConfig,
         on_merge: Callable[[CutState, int, int], None] | None = None) -> Partition:
    """Merge the blocks of ``initial`` down to ``cfg.k`` connected blocks.

    Every block of ``initial`` must be non-empty and connected. ``on_merge``
    is called as ``on_merge(state, smallest, target)`` before each merge.
    Output blocks are numbered by their smallest node.
    """
    if initial.n != g.n:
        raise ValueError("partition does not cover the graph")
    if (initial.sizes == 0).any():
        raise ValueError("initial partition has empty blocks")
    if initial.block_count < cfg.k:
        raise InsufficientCommunitiesError(
            f"initial partition has {initial.block_count} blocks, fewer than k={cfg.k}")
    if block_components(g, initial.labels).count != initial.block_count:
        raise DisconnectedBlockError("a block is disconnected; run split_into_components first")
    if initial.block_count > cfg.k and not is_connected(g):
        raise DisconnectedGraphError("fusion needs a connected graph")

    cap = max_part_size(g.n, cfg.k, cfg.alpha)
    state = CutState.from_partition(g, initial)
    parent = list(range(initial.block_count))
    fallbacks = 0
    while len(state) > cfg.k:
        small = state.smallest()
        target = largest_edge_cut_neighbor(state, small, cap)
        if state.sizes[small] + state.sizes[target] >= cap:
            fallbacks += 1
            log.debug("fallback merge %d(%d) -> %d(%d) exceeds max_part_size=%d",
                      small, state.sizes[small], target, state.sizes[target], cap)
        if on_merge is not None:
            on_merge(state, small, target)
        keep = state.merge(small, target)
        parent[small] = parent[target] = keep
    if fallbacks:
        log.info("%d merges exceeded max_part_size=%d", fallbacks, cap)

    def find(c):
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    return _relabel_active(initial.labels, initial.block_count, find)


def split_into_components(g: Graph, p: Partition) -> Partition:
    """Refine ``p`` so that each block is one connected piece of an original block."""
    return Partition(block_components(g, p.labels).labels)


def lf_partition(g: Graph, cfg: FusionConfig) -> Partition:
    """Size-capped Leiden followed by fusion down to ``cfg.k`` blocks."""
    if g.n < cfg.k:
        raise ValueError(f"cannot split {g.n} nodes into {cfg.k} blocks")
    if not is_connected(g):
        raise DisconnectedGraphError("input graph is disconnected")
    if cfg.k == 1:
        return Partition(np.zeros(g.n, dtype=np.int64), 1)
    cap = community_size_cap(g.n, cfg.k, cfg.alpha, cfg.beta)
    communities = leiden_communities(
        g, LeidenConfig(cap, resolution=cfg.resolution, seed=cfg.seed, max_passes=cfg.max_passes))
    if communities.block_count < cfg.k:
        raise InsufficientCommunitiesError(
            f"Leiden found {communities.block_count} communities, fewer than k={cfg.k}; lower beta")
    return fuse(g, communities, cfg)

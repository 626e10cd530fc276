"""Leiden community detection with a hard cap on community size.

The three classic phases are kept: queue-driven local moving, refinement into
well-connected sub-communities, and aggregation. A move that would push any
community above ``max_community_size`` nodes is never taken, in any phase.

The inner loops are numba kernels over CSR arrays. Node visiting orders are
drawn by numpy outside the kernels, so a seed fully determines the result.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numba
import numpy as np

from .graph import DisconnectedGraphError, Graph, block_components, is_connected
from .partition import Partition

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LeidenConfig:
    max_community_size: int
    resolution: float = 1.0
    seed: int | None = 0
    max_passes: int = 10
    min_gain: float = 1e-9

    def __post_init__(self):
        if self.max_community_size < 1:
            raise ValueError("max_community_size must be >= 1")
        if not self.resolution > 0:
            raise ValueError("resolution must be > 0")
        if self.max_passes < 1:
            raise ValueError("max_passes must be >= 1")


def modularity(g: Graph, p: Partition, resolution: float = 1.0) -> float:
    """Sum over blocks of ``e_c/m - resolution * (K_c / 2m)**2``.

    ``e_c`` counts edges inside block ``c`` and ``K_c`` is its degree sum.
    """
    if g.m == 0:
        raise ValueError("modularity is undefined on a graph without edges")
    if p.n != g.n:
        raise ValueError("partition does not cover the graph")
    u, v = g.edge_arrays()
    lab = p.labels
    same = lab[u] == lab[v]
    internal = np.bincount(lab[u][same], minlength=p.block_count)
    degsum = np.bincount(lab, weights=g.degrees, minlength=p.block_count)
    m = g.m
    return float(np.sum(internal / m) - resolution * np.sum((degsum / (2 * m)) ** 2))


def move_gain(g: Graph, p: Partition, v: int, target: int, resolution: float = 1.0) -> float:
    """Change in modularity if node ``v`` moves to block ``target``.

    ``target == p.block_count`` denotes a new, empty block.
    """
    if not 0 <= v < g.n:
        raise IndexError(f"node {v} out of range")
    if not 0 <= target <= p.block_count:
        raise IndexError(f"block {target} out of range")
    lab = p.labels
    src = lab[v]
    if target == src:
        return 0.0
    m = g.m
    kv = int(g.degrees[v])
    nbr_blocks = lab[g.neighbors(v)]
    links_src = int(np.count_nonzero(nbr_blocks == src))
    links_dst = int(np.count_nonzero(nbr_blocks == target))
    degsum = np.bincount(lab, weights=g.degrees, minlength=p.block_count + 1)
    k_src = float(degsum[src]) - kv
    k_dst = float(degsum[target])
    return (links_dst - links_src) / m - resolution * kv * (k_dst - k_src) / (2.0 * m * m)


def _dense(labels: np.ndarray) -> tuple[np.ndarray, int]:
    """Relabel to ``0..c-1`` in order of first occurrence."""
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first)] = np.arange(len(first))
    return rank[inverse], len(first)


@numba.njit(cache=True)
def _still_connected(indptr, indices, comm, v, src, stamp, pend, vis, stack):
    # src \ {v} stays connected iff v's neighbours inside src reach each other
    pending = 0
    start = -1
    for j in range(indptr[v], indptr[v + 1]):
        u = indices[j]
        if comm[u] == src and pend[u] != stamp:
            pend[u] = stamp
            pending += 1
            start = u
    if pending <= 1:
        return True
    vis[v] = stamp
    vis[start] = stamp
    pending -= 1
    top = 0
    stack[top] = start
    top += 1
    while top > 0 and pending > 0:
        top -= 1
        x = stack[top]
        for j in range(indptr[x], indptr[x + 1]):
            y = indices[j]
            if vis[y] != stamp and comm[y] == src:
                vis[y] = stamp
                stack[top] = y
                top += 1
                if pend[y] == stamp:
                    pending -= 1
    return pending == 0


@numba.njit(cache=True)
def _move_nodes(indptr, indices, wts, deg, size, comm, cap, gamma, two_m, order, guard):
    """Queue-driven local moving; ``comm`` (ids < n) is updated in place.

    With ``guard`` set, a node is never moved out of a community that would
    become disconnected without it (only meaningful on the unaggregated graph).
    """
    nn = len(deg)
    K = np.zeros(nn, dtype=np.int64)
    csize = np.zeros(nn, dtype=np.int64)
    for v in range(nn):
        K[comm[v]] += deg[v]
        csize[comm[v]] += size[v]
    empty = np.empty(nn, dtype=np.int64)
    n_empty = 0
    for c in range(nn - 1, -1, -1):
        if csize[c] == 0:
            empty[n_empty] = c
            n_empty += 1
    links = np.zeros(nn, dtype=np.int64)
    touched = np.empty(nn, dtype=np.int64)
    queue = order.copy()
    queued = np.ones(nn, dtype=np.bool_)
    head = 0
    tail = 0
    qlen = nn
    stamp = 0
    pend = np.zeros(nn if guard else 1, dtype=np.int64)
    vis = np.zeros(nn if guard else 1, dtype=np.int64)
    stack = np.empty(nn if guard else 1, dtype=np.int64)
    moves = 0
    while qlen > 0:
        v = queue[head]
        head = (head + 1) % nn
        qlen -= 1
        queued[v] = False
        src = comm[v]
        kv = deg[v]
        sv = size[v]
        nt = 0
        for j in range(indptr[v], indptr[v + 1]):
            c = comm[indices[j]]
            if links[c] == 0:
                touched[nt] = c
                nt += 1
            links[c] += wts[j]
        K[src] -= kv
        csize[src] -= sv
        best = src
        best_score = two_m * links[src] - gamma * kv * K[src]
        for t in range(nt):
            c = touched[t]
            if c == src or csize[c] + sv > cap:
                continue
            s = two_m * links[c] - gamma * kv * K[c]
            if s > best_score or (s == best_score and best != src and c < best):
                best = c
                best_score = s
        # a fresh block scores 0; only useful while src keeps other members
        if csize[src] > 0 and n_empty > 0 and best_score < 0.0:
            best = empty[n_empty - 1]
            best_score = 0.0
        if best != src and guard:
            stamp += 1
            if not _still_connected(indptr, indices, comm, v, src, stamp, pend, vis, stack):
                best = src
        for t in range(nt):
            links[touched[t]] = 0
        if best == src:
            K[src] += kv
            csize[src] += sv
            continue
        if csize[best] == 0:
            n_empty -= 1
        if csize[src] == 0:
            empty[n_empty] = src
            n_empty += 1
        comm[v] = best
        K[best] += kv
        csize[best] += sv
        moves += 1
        for j in range(indptr[v], indptr[v + 1]):
            u = indices[j]
            if not queued[u] and comm[u] != best:
                queued[u] = True
                queue[tail] = u
                tail = (tail + 1) % nn
                qlen += 1
    return moves


@numba.njit(cache=True)
def _refine(indptr, indices, wts, deg, size, comm, cap, gamma, two_m, order):
    """Merge singletons within each community into well-connected refined
    blocks; a node only joins a block it has edges to, so every refined
    block is connected."""
    nn = len(deg)
    Kc = np.zeros(nn, dtype=np.int64)
    for v in range(nn):
        Kc[comm[v]] += deg[v]
    ref = np.arange(nn)
    Kr = deg.copy()
    sr = size.copy()
    members = np.ones(nn, dtype=np.int64)
    ext = np.zeros(nn, dtype=np.int64)
    for v in range(nn):
        for j in range(indptr[v], indptr[v + 1]):
            if comm[indices[j]] == comm[v]:
                ext[v] += wts[j]
    links = np.zeros(nn, dtype=np.int64)
    touched = np.empty(nn, dtype=np.int64)
    for v in order:
        own = ref[v]
        if members[own] != 1:
            continue
        P = comm[v]
        kv = deg[v]
        if two_m * ext[v] < gamma * kv * (Kc[P] - kv):
            continue
        nt = 0
        for j in range(indptr[v], indptr[v + 1]):
            u = indices[j]
            if comm[u] != P:
                continue
            r = ref[u]
            if links[r] == 0:
                touched[nt] = r
                nt += 1
            links[r] += wts[j]
        best = -1
        best_score = 0.0
        for t in range(nt):
            r = touched[t]
            if sr[r] + size[v] > cap:
                continue
            if two_m * ext[r] < gamma * Kr[r] * (Kc[P] - Kr[r]):
                continue
            s = two_m * links[r] - gamma * kv * Kr[r]
            if s > best_score or (s == best_score and best >= 0 and r < best):
                best = r
                best_score = s
        if best >= 0:
            ext[best] += ext[own] - 2 * links[best]
            Kr[best] += kv
            sr[best] += size[v]
            members[best] += 1
            members[own] = 0
            ref[v] = best
        for t in range(nt):
            links[touched[t]] = 0
    return ref


@numba.njit(cache=True)
def _aggregate(indptr, indices, wts, groups, count):
    nn = len(groups)
    order = np.argsort(groups, kind="mergesort")
    new_ptr = np.zeros(count + 1, dtype=np.int64)
    new_idx = np.empty(len(indices), dtype=np.int64)
    new_wts = np.empty(len(indices), dtype=np.int64)
    links = np.zeros(count, dtype=np.int64)
    touched = np.empty(count, dtype=np.int64)
    pos = 0
    i = 0
    for a in range(count):
        nt = 0
        while i < nn and groups[order[i]] == a:
            v = order[i]
            for j in range(indptr[v], indptr[v + 1]):
                b = groups[indices[j]]
                if b == a:
                    continue
                if links[b] == 0:
                    touched[nt] = b
                    nt += 1
                links[b] += wts[j]
            i += 1
        for t in range(nt):
            b = touched[t]
            new_idx[pos] = b
            new_wts[pos] = links[b]
            links[b] = 0
            pos += 1
        new_ptr[a + 1] = pos
    return new_ptr, new_idx[:pos].copy(), new_wts[:pos].copy()


def _iteration(g: Graph, labels: np.ndarray, cap: int, gamma: float,
               rng: np.random.Generator) -> np.ndarray:
    """One multi-level Leiden iteration starting from ``labels``."""
    two_m = float(2 * g.m)
    indptr, indices = g.indptr, g.indices
    wts = np.ones(len(indices), dtype=np.int64)
    deg = g.degrees.astype(np.int64)
    size = np.ones(g.n, dtype=np.int64)
    comm, _ = _dense(labels)
    node_map = np.arange(g.n)
    while True:
        nn = len(deg)
        _move_nodes(indptr, indices, wts, deg, size, comm, cap, gamma, two_m,
                    rng.permutation(nn), False)
        comm, ncomm = _dense(comm)
        if ncomm == nn:
            break
        groups, ngroups = _dense(_refine(indptr, indices, wts, deg, size, comm, cap, gamma,
                                         two_m, rng.permutation(nn)))
        if ngroups == nn:
            # refinement merged nothing; aggregate the moved partition to make progress
            groups, ngroups = comm, ncomm
        next_comm = np.empty(ngroups, dtype=np.int64)
        next_comm[groups] = comm
        indptr, indices, wts = _aggregate(indptr, indices, wts, groups, ngroups)
        deg = np.bincount(groups, weights=deg, minlength=ngroups).astype(np.int64)
        size = np.bincount(groups, weights=size, minlength=ngroups).astype(np.int64)
        node_map = groups[node_map]
        comm = next_comm
    return comm[node_map]


def leiden_communities(g: Graph, cfg: LeidenConfig) -> Partition:
    """Size-capped Leiden communities of a connected graph.

    Every returned community induces a connected subgraph and has at most
    ``cfg.max_community_size`` nodes. On return no single-node move that
    respects the cap and leaves its source community connected improves
    modularity. Block ids are ordered by each block's smallest node.
    """
    if g.n == 0:
        raise ValueError("graph has no nodes")
    if not is_connected(g):
        raise DisconnectedGraphError("input graph is disconnected; partition each component separately")
    if g.m == 0:
        return Partition(np.zeros(g.n, dtype=np.int64), 1)
    rng = np.random.default_rng(cfg.seed)
    cap = int(cfg.max_community_size)
    gamma = float(cfg.resolution)
    two_m = float(2 * g.m)
    wts = np.ones(len(g.indices), dtype=np.int64)
    deg = g.degrees.astype(np.int64)
    ones = np.ones(g.n, dtype=np.int64)

    labels = np.arange(g.n, dtype=np.int64)
    quality = modularity(g, Partition(labels), gamma)
    for step in range(cfg.max_passes):
        labels = _iteration(g, labels, cap, gamma, rng)
        labels = block_components(g, labels).labels
        polished = _move_nodes(g.indptr, g.indices, wts, deg, ones, labels, cap, gamma,
                               two_m, rng.permutation(g.n), True)
        labels, count = _dense(labels)
        new_quality = modularity(g, Partition(labels, count), gamma)
        log.debug("leiden pass %d: %d communities, Q=%.6f, %d polish moves",
                  step, count, new_quality, polished)
        if new_quality - quality < cfg.min_gain:
            break
        quality = new_quality
    return Partition(labels)

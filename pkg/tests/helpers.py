"""Independent reference implementations used as test oracles.

Nothing here imports the algorithms under test; only plain Python over edge
lists, so a bug in the package cannot hide behind a shared helper.
"""

from collections import Counter, defaultdict
from pathlib import Path

import numpy as np

DATA = Path(__file__).parent / "data"


def uf_components(n, edges):
    """Union-find component count and a representative per node."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    roots = [find(x) for x in range(n)]
    return len(set(roots)), roots


def naive_modularity(n, edges, labels, gamma=1.0):
    m = len(edges)
    deg = Counter()
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    inside = Counter()
    degsum = Counter()
    for u, v in edges:
        if labels[u] == labels[v]:
            inside[labels[u]] += 1
    for x in range(n):
        degsum[labels[x]] += deg[x]
    return sum(inside[c] / m - gamma * (degsum[c] / (2 * m)) ** 2 for c in set(labels))


def naive_metrics(n, edges, labels, k):
    """Per-definition recount of every report field (RF excluded)."""
    blocks = defaultdict(list)
    for x in range(n):
        blocks[labels[x]].append(x)
    cut = sum(1 for u, v in edges if labels[u] != labels[v])
    comps, isolated, internal = [], [], []
    for b in range(k):
        members = blocks.get(b, [])
        index = {x: i for i, x in enumerate(members)}
        inner = [(index[u], index[v]) for u, v in edges if u in index and v in index]
        comps.append(uf_components(len(members), inner)[0] if members else 0)
        touched = set()
        for u, v in inner:
            touched.add(u)
            touched.add(v)
        isolated.append(len(members) - len(touched))
        internal.append(len(inner))
    return {
        "tau": cut / len(edges),
        "components": comps,
        "isolated": isolated,
        "rho_nodes": max(len(blocks.get(b, [])) for b in range(k)) / (n / k),
        "rho_edges": max(internal) / (len(edges) / k),
        "cut": cut,
    }


def set_partitions(items, max_block=None):
    """Every partition of ``items`` into blocks (restricted-growth strings)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for smaller in set_partitions(rest, max_block):
        for i, block in enumerate(smaller):
            if max_block is None or len(block) < max_block:
                yield smaller[:i] + [[first] + block] + smaller[i + 1:]
        yield [[first]] + smaller


def random_connected_edges(n, extra, rng, communities=0, p_in=0.8):
    """Random spanning tree plus ``extra`` further edges.

    With ``communities > 0`` extra edges fall inside one of that many
    contiguous node groups with probability ``p_in``.
    """
    order = rng.permutation(n)
    edges = set()
    for i in range(1, n):
        a = int(order[i])
        b = int(order[rng.integers(0, i)])
        edges.add((min(a, b), max(a, b)))
    target = len(edges) + extra
    tries = 0
    group = max(1, n // communities) if communities else n
    while len(edges) < target and tries < 20 * target:
        tries += 1
        u = int(rng.integers(0, n))
        if communities and rng.random() < p_in:
            base = (u // group) * group
            v = int(rng.integers(base, min(n, base + group)))
        else:
            v = int(rng.integers(0, n))
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return sorted(edges)


def to_graph(n, edges):
    from leidenfusion.graph import Graph

    arr = np.array(edges, dtype=np.int64).reshape(-1, 2)
    return Graph.from_edges(arr[:, 0], arr[:, 1], n=n)


def barbell_edges():
    return [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)]


def triangle_ring_edges(count=4):
    """``count`` triangles, consecutive ones joined by a single edge."""
    edges = []
    for t in range(count):
        a, b, c = 3 * t, 3 * t + 1, 3 * t + 2
        edges += [(a, b), (a, c), (b, c)]
        nxt = 3 * ((t + 1) % count)
        edges.append((min(c, nxt), max(c, nxt)))
    return edges

"""Per-partition training subgraphs.

``inner`` keeps only edges inside a block. ``repli`` also copies every
one-hop neighbour owned by another block (a halo node) together with the
edges that connect it to owned nodes; halo-halo edges are left out.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import Graph, write_edge_list
from .partition import Partition

MODES = ("inner", "repli")


@dataclass
class PartSubgraph:
    graph: Graph          # local ids; graph.ids are external node ids
    nodes: np.ndarray     # local id -> dense id in the source graph
    owned: np.ndarray     # bool per local id; False marks a halo node

    @property
    def halo_count(self) -> int:
        return int(np.count_nonzero(~self.owned))


@dataclass
class SubgraphBundle:
    mode: str
    n: int
    parts: list[PartSubgraph]

    @property
    def k(self) -> int:
        return len(self.parts)


def worker_count() -> int:
    """Thread cap from ``LF_THREADS``; 0 or unset means one per CPU."""
    raw = os.environ.get("LF_THREADS", "0")
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"LF_THREADS must be an integer, got {raw!r}") from None
    if value < 0:
        raise ValueError("LF_THREADS must be >= 0")
    return value or (os.cpu_count() or 1)


def _part(g: Graph, labels: np.ndarray, u: np.ndarray, v: np.ndarray, block: int,
          repli: bool) -> PartSubgraph:
    in_u = labels[u] == block
    in_v = labels[v] == block
    keep = (in_u | in_v) if repli else (in_u & in_v)
    eu, ev = u[keep], v[keep]
    owned_nodes = np.flatnonzero(labels == block)
    nodes = np.union1d(owned_nodes, np.concatenate([eu, ev])) if repli else owned_nodes
    local = np.full(g.n, -1, dtype=np.int64)
    local[nodes] = np.arange(len(nodes))
    sub = Graph.from_edges(local[eu], local[ev], n=len(nodes), ids=g.ids[nodes])
    return PartSubgraph(sub, nodes, labels[nodes] == block)


def _export(g: Graph, p: Partition, repli: bool) -> SubgraphBundle:
    if p.n != g.n:
        raise ValueError("partition does not cover the graph")
    u, v = g.edge_arrays()
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        parts = list(pool.map(lambda b: _part(g, p.labels, u, v, b, repli),
                              range(p.block_count)))
    return SubgraphBundle("repli" if repli else "inner", g.n, parts)


def export_inner(g: Graph, p: Partition) -> SubgraphBundle:
    """One subgraph per block, cross-block edges dropped."""
    return _export(g, p, repli=False)


def export_repli(g: Graph, p: Partition) -> SubgraphBundle:
    """One subgraph per block plus flagged halo copies of one-hop boundary
    neighbours, so every cut edge lives in both blocks it touches."""
    return _export(g, p, repli=True)


def export(g: Graph, p: Partition, mode: str) -> SubgraphBundle:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return _export(g, p, repli=mode == "repli")


def write_bundle(bundle: SubgraphBundle, out_dir) -> list[Path]:
    """Write ``part-XXXX/{edges.txt,manifest.txt,meta.json}`` under ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    def write(i: int) -> Path:
        part = bundle.parts[i]
        d = out / f"part-{i:04d}"
        d.mkdir(exist_ok=True)
        with open(d / "edges.txt", "w", encoding="utf-8") as fh:
            write_edge_list(part.graph, fh)
        flags = np.where(part.owned, "owned", "halo")
        with open(d / "manifest.txt", "w", encoding="utf-8") as fh:
            fh.write("".join(f"{loc} {gid} {flag}\n" for loc, (gid, flag)
                             in enumerate(zip(part.graph.ids.tolist(), flags.tolist()))))
        meta = {
            "mode": bundle.mode,
            "k": bundle.k,
            "partition": i,
            "graph_nodes": bundle.n,
            "nodes": part.graph.n,
            "owned": int(part.owned.sum()),
            "halo": part.halo_count,
            "edges": part.graph.m,
        }
        (d / "meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
        return d

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return list(pool.map(write, range(bundle.k)))

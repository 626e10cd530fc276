"""Partition quality metrics and their flat text serialization."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .export import SubgraphBundle
from .graph import Graph, block_components
from .partition import Partition


def _check(g: Graph, p: Partition) -> None:
    if p.n != g.n:
        raise ValueError("partition does not cover the graph")


def edge_cut_count(g: Graph, p: Partition) -> int:
    """Number of edges whose endpoints lie in different blocks, each counted once."""
    _check(g, p)
    u, v = g.edge_arrays()
    return int(np.count_nonzero(p.labels[u] != p.labels[v]))


def edge_cut_fraction(g: Graph, p: Partition) -> float:
    if g.m == 0:
        raise ValueError("edge cut fraction is undefined on a graph without edges")
    return edge_cut_count(g, p) / g.m


def internal_edge_counts(g: Graph, p: Partition) -> np.ndarray:
    _check(g, p)
    u, v = g.edge_arrays()
    lab_u = p.labels[u]
    return np.bincount(lab_u[lab_u == p.labels[v]], minlength=p.block_count)


def component_counts(g: Graph, p: Partition) -> np.ndarray:
    """Connected components inside each block (0 for an empty block)."""
    _check(g, p)
    comp = block_components(g, p.labels)
    owner = np.zeros(comp.count, dtype=np.int64)
    owner[comp.labels] = p.labels
    return np.bincount(owner, minlength=p.block_count)


def isolated_node_counts(g: Graph, p: Partition) -> np.ndarray:
    """Nodes per block with no neighbour in their own block."""
    _check(g, p)
    src = np.repeat(np.arange(g.n, dtype=np.int64), g.degrees)
    same = p.labels[src] == p.labels[g.indices]
    inner_deg = np.bincount(src[same], minlength=g.n)
    return np.bincount(p.labels[inner_deg == 0], minlength=p.block_count)


def node_balance(p: Partition, k: int | None = None) -> float:
    """Largest block size over the ideal ``n / k``."""
    k = p.block_count if k is None else k
    if k <= 0:
        raise ValueError("k must be positive")
    return float(p.sizes.max()) * k / p.n


def edge_balance(g: Graph, p: Partition, k: int | None = None) -> float:
    """Largest per-block internal edge count over the ideal ``m / k``.

    Cut edges belong to no block, so the value drops below 1 when many edges
    are cut.
    """
    k = p.block_count if k is None else k
    if k <= 0:
        raise ValueError("k must be positive")
    if g.m == 0:
        raise ValueError("edge balance is undefined on a graph without edges")
    return float(internal_edge_counts(g, p).max()) * k / g.m


def replication_factor(bundle: SubgraphBundle) -> float:
    """Average number of subgraphs that materialize each node."""
    return sum(part.graph.n for part in bundle.parts) / bundle.n


@dataclass
class MetricsReport:
    n: int
    m: int
    k: int
    tau: float
    components: list[int] = field(default_factory=list)
    isolated: list[int] = field(default_factory=list)
    rho_nodes: float = 1.0
    rho_edges: float = 1.0
    replication_factor: float | None = None

    def to_text(self) -> str:
        """``key value`` lines in a fixed order; floats use shortest round-trip form."""
        lines = [f"tau {self.tau!r}"]
        lines += [f"components[{i}] {c}" for i, c in enumerate(self.components)]
        lines += [f"isolated[{i}] {c}" for i, c in enumerate(self.isolated)]
        lines.append(f"rho_nodes {self.rho_nodes!r}")
        lines.append(f"rho_edges {self.rho_edges!r}")
        if self.replication_factor is not None:
            lines.append(f"replication_factor {self.replication_factor!r}")
        lines += [f"n {self.n}", f"m {self.m}", f"k {self.k}"]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "MetricsReport":
        values: dict[str, str] = {}
        comps: dict[int, int] = {}
        isol: dict[int, int] = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            key, value = line.split()
            if key.startswith("components["):
                comps[int(key[11:-1])] = int(value)
            elif key.startswith("isolated["):
                isol[int(key[9:-1])] = int(value)
            else:
                values[key] = value
        rf = values.get("replication_factor")
        return cls(
            n=int(values["n"]), m=int(values["m"]), k=int(values["k"]),
            tau=float(values["tau"]),
            components=[comps[i] for i in sorted(comps)],
            isolated=[isol[i] for i in sorted(isol)],
            rho_nodes=float(values["rho_nodes"]), rho_edges=float(values["rho_edges"]),
            replication_factor=None if rf is None else float(rf),
        )


def metrics_report(g: Graph, p: Partition, bundle: SubgraphBundle | None = None) -> MetricsReport:
    return MetricsReport(
        n=g.n,
        m=g.m,
        k=p.block_count,
        tau=edge_cut_fraction(g, p),
        components=component_counts(g, p).tolist(),
        isolated=isolated_node_counts(g, p).tolist(),
        rho_nodes=node_balance(p),
        rho_edges=edge_balance(g, p),
        replication_factor=None if bundle is None else replication_factor(bundle),
    )

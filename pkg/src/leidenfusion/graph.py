"""Undirected graph in compressed sparse row form, plus edge-list I/O and
connectivity helpers shared by every partitioner."""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _sp_components

log = logging.getLogger(__name__)

_MAX_ID = np.iinfo(np.int64).max


class GraphFormatError(ValueError):
    """Raised for malformed or unusable edge-list input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DisconnectedGraphError(ValueError):
    """The operation needs a connected input graph."""


class Graph:
    """Immutable, unweighted, undirected graph.

    Adjacency is stored as ``indptr``/``indices`` (CSR) over dense node ids
    ``0..n-1``; each row is sorted, free of duplicates and self-loops.
    ``ids`` maps a dense id back to the id used in the source file.
    """

    __slots__ = ("indptr", "indices", "ids", "_adj")

    def __init__(self, indptr, indices, ids=None):
        indptr = np.array(indptr, dtype=np.int64)
        indices = np.array(indices, dtype=np.int64)
        n = len(indptr) - 1
        if ids is None:
            ids = np.arange(n, dtype=np.int64)
        ids = np.array(ids, dtype=np.int64)
        if len(ids) != n:
            raise ValueError("ids length does not match node count")
        for arr in (indptr, indices, ids):
            arr.setflags(write=False)
        self.indptr = indptr
        self.indices = indices
        self.ids = ids
        self._adj = None

    @classmethod
    def from_edges(cls, src, dst, n: int | None = None, ids=None) -> "Graph":
        """Build a graph from endpoint arrays over dense ids.

        Edges may be given in either or both directions; self-loops and
        duplicates are removed.
        """
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if n is None:
            n = int(max(src.max(initial=-1), dst.max(initial=-1)) + 1)
        keep = src != dst
        src, dst = src[keep], dst[keep]
        u = np.concatenate([src, dst])
        v = np.concatenate([dst, src])
        if len(u):
            key = np.unique(u * n + v)
            u, v = key // n, key % n
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(u, minlength=n), out=indptr[1:])
        return cls(indptr, v, ids)

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def m(self) -> int:
        return len(self.indices) // 2

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def adjacency(self) -> list[list[int]]:
        """Neighbor lists as plain Python lists (cached); fast for scalar loops."""
        if self._adj is None:
            flat = self.indices.tolist()
            ptr = self.indptr.tolist()
            self._adj = [flat[ptr[i]:ptr[i + 1]] for i in range(self.n)]
        return self._adj

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Each undirected edge once, as ``(u, v)`` with ``u < v``, sorted."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        keep = src < self.indices
        return src[keep], self.indices[keep]

    def to_csr(self) -> csr_matrix:
        data = np.ones(len(self.indices), dtype=np.int8)
        return csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class ComponentLabeling:
    labels: np.ndarray
    count: int


def _as_nodes(g: Graph, nodes: Iterable[int]) -> np.ndarray:
    arr = np.unique(np.fromiter(nodes, dtype=np.int64) if not isinstance(nodes, np.ndarray)
                    else nodes.astype(np.int64))
    if len(arr) and (arr[0] < 0 or arr[-1] >= g.n):
        raise IndexError(f"node id out of range for graph with n={g.n}")
    return arr


def load_edge_list(source, symmetrize: bool = True, skip_self_loops: bool = True) -> Graph:
    """Parse a whitespace-separated edge list.

    ``source`` is a path, a binary/text stream, or raw ``bytes``. Lines hold
    ``u v`` or ``u v w``; the weight is validated and dropped. Lines starting
    with ``#`` and blank lines are skipped. Node ids are compacted to
    ``0..n-1`` in ascending order of their original value.

    The graph is always stored undirected, so ``symmetrize`` has no effect and
    is accepted for compatibility. Self-loops are an error unless
    ``skip_self_loops`` is set; a node that only has self-loops is dropped.
    """
    if isinstance(source, (bytes, bytearray)):
        stream: IO = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, str) or hasattr(source, "__fspath__"):
        with open(source, "rb") as fh:
            return load_edge_list(fh.read(), symmetrize, skip_self_loops)
    else:
        stream = source

    src: list[int] = []
    dst: list[int] = []
    self_loops = 0
    for lineno, raw in enumerate(stream, start=1):
        line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise GraphFormatError(f"expected 'u v' or 'u v w', got {line!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"non-integer node id in {line!r}", lineno) from None
        if len(parts) == 3:
            try:
                float(parts[2])
            except ValueError:
                raise GraphFormatError(f"non-numeric weight in {line!r}", lineno) from None
        if u < 0 or v < 0:
            raise GraphFormatError(f"negative node id in {line!r}", lineno)
        if u > _MAX_ID or v > _MAX_ID:
            raise GraphFormatError(f"node id overflows 64 bits in {line!r}", lineno)
        if u == v:
            if not skip_self_loops:
                raise GraphFormatError(f"self-loop on node {u}", lineno)
            self_loops += 1
            continue
        src.append(u)
        dst.append(v)

    if not src:
        raise GraphFormatError("edge list contains no edges")

    s = np.array(src, dtype=np.int64)
    d = np.array(dst, dtype=np.int64)
    ids, inverse = np.unique(np.concatenate([s, d]), return_inverse=True)
    s, d = inverse[: len(s)], inverse[len(s):]
    g = Graph.from_edges(s, d, n=len(ids), ids=ids)
    dupes = len(src) - g.m
    if self_loops or dupes:
        log.warning("dropped %d self-loops and %d duplicate edges", self_loops, dupes)
    if not symmetrize:
        log.debug("symmetrize=False has no effect: graphs are stored undirected")
    return g


def write_edge_list(g: Graph, fh, use_ids: bool = False) -> None:
    """Write one ``u v`` line per undirected edge, ``u < v``, in sorted order."""
    u, v = g.edge_arrays()
    if use_ids:
        u, v = g.ids[u], g.ids[v]
    fh.write("".join(f"{a} {b}\n" for a, b in zip(u.tolist(), v.tolist())))


def induced_subgraph(g: Graph, nodes) -> Graph:
    """Subgraph on ``nodes`` with local ids; ``result.ids`` holds the dense
    ids of ``g`` (not the external ids) so callers can map back."""
    keep_nodes = _as_nodes(g, nodes)
    local = np.full(g.n, -1, dtype=np.int64)
    local[keep_nodes] = np.arange(len(keep_nodes))
    src = np.repeat(np.arange(g.n, dtype=np.int64), g.degrees)
    mask = (local[src] >= 0) & (local[g.indices] >= 0)
    ls, ld = local[src[mask]], local[g.indices[mask]]
    indptr = np.zeros(len(keep_nodes) + 1, dtype=np.int64)
    np.cumsum(np.bincount(ls, minlength=len(keep_nodes)), out=indptr[1:])
    return Graph(indptr, ld, keep_nodes)


def connected_components(g: Graph) -> ComponentLabeling:
    """Component labels numbered in order of each component's smallest node."""
    if g.n == 0:
        return ComponentLabeling(np.zeros(0, dtype=np.int64), 0)
    count, raw = _sp_components(g.to_csr(), directed=False)
    _, first = np.unique(raw, return_index=True)
    order = np.argsort(first)
    relabel = np.empty(count, dtype=np.int64)
    relabel[order] = np.arange(count)
    return ComponentLabeling(relabel[raw], int(count))


def is_connected(g: Graph) -> bool:
    return connected_components(g).count == 1


def block_components(g: Graph, labels) -> ComponentLabeling:
    """Components of ``g`` after deleting every edge whose endpoints carry
    different labels. Each resulting component lies inside one label class."""
    labels = np.asarray(labels)
    src = np.repeat(np.arange(g.n, dtype=np.int64), g.degrees)
    keep = labels[src] == labels[g.indices]
    data = np.ones(int(keep.sum()), dtype=np.int8)
    mat = csr_matrix((data, (src[keep], g.indices[keep])), shape=(g.n, g.n))
    count, raw = _sp_components(mat, directed=False)
    _, first = np.unique(raw, return_index=True)
    order = np.argsort(first)
    relabel = np.empty(count, dtype=np.int64)
    relabel[order] = np.arange(count)
    return ComponentLabeling(relabel[raw], int(count))


def cut_edges(g: Graph, a, b) -> int:
    """Number of undirected edges with one endpoint in ``a`` and one in ``b``."""
    a = _as_nodes(g, a)
    b = _as_nodes(g, b)
    if np.intersect1d(a, b, assume_unique=True).size:
        raise ValueError("node sets overlap")
    if not len(a) or not len(b):
        return 0
    in_a = np.zeros(g.n, dtype=bool)
    in_b = np.zeros(g.n, dtype=bool)
    in_a[a] = True
    in_b[b] = True
    src = np.repeat(np.arange(g.n, dtype=np.int64), g.degrees)
    return int(np.count_nonzero(in_a[src] & in_b[g.indices]))

"""Node-to-block assignments and the two-column partition file format."""

from __future__ import annotations

import io

import numpy as np

from .graph import Graph


class PartitionFileError(ValueError):
    def __init__(self, message: str, node_id: int | None = None):
        self.node_id = node_id
        super().__init__(message)


class Partition:
    """Total assignment of nodes to blocks ``0..block_count-1``.

    Blocks produced by the partitioners are non-empty. ``block_count`` may be
    passed explicitly to keep empty trailing blocks, which label propagation
    is allowed to produce.
    """

    __slots__ = ("labels", "block_count")

    def __init__(self, labels, block_count: int | None = None):
        labels = np.array(labels, dtype=np.int64)
        if len(labels) and labels.min() < 0:
            raise ValueError("block ids must be non-negative")
        top = int(labels.max()) + 1 if len(labels) else 0
        if block_count is None:
            block_count = top
        elif block_count < top:
            raise ValueError(f"block id {top - 1} exceeds block_count={block_count}")
        labels.setflags(write=False)
        self.labels = labels
        self.block_count = int(block_count)

    @classmethod
    def from_blocks(cls, n: int, blocks) -> "Partition":
        labels = np.full(n, -1, dtype=np.int64)
        for b, nodes in enumerate(blocks):
            nodes = np.asarray(list(nodes) if not isinstance(nodes, np.ndarray) else nodes,
                               dtype=np.int64)
            if (labels[nodes] >= 0).any():
                raise ValueError("blocks overlap")
            labels[nodes] = b
        if (labels < 0).any():
            raise ValueError("blocks do not cover every node")
        return cls(labels, len(blocks))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.block_count)

    def blocks(self) -> list[np.ndarray]:
        order = np.argsort(self.labels, kind="stable")
        bounds = np.cumsum(self.sizes)[:-1]
        return np.split(order, bounds)

    def compact(self) -> "Partition":
        """Drop empty blocks, keeping the relative order of the rest."""
        used, labels = np.unique(self.labels, return_inverse=True)
        return Partition(labels, len(used))

    def canonical(self) -> "Partition":
        """Renumber blocks by descending size, then by smallest member node."""
        p = self.compact()
        sizes = p.sizes
        first = np.full(p.block_count, p.n, dtype=np.int64)
        np.minimum.at(first, p.labels, np.arange(p.n))
        order = np.lexsort((first, -sizes))
        relabel = np.empty(p.block_count, dtype=np.int64)
        relabel[order] = np.arange(p.block_count)
        return Partition(relabel[p.labels], p.block_count)

    def __eq__(self, other):
        return (isinstance(other, Partition) and self.block_count == other.block_count
                and np.array_equal(self.labels, other.labels))

    def __repr__(self):
        return f"Partition(n={self.n}, block_count={self.block_count})"


def write_partition_file(g: Graph, p: Partition, fh) -> None:
    """One ``global_node_id partition_id`` line per node, ascending node id."""
    fh.write("".join(f"{i} {b}\n" for i, b in zip(g.ids.tolist(), p.labels.tolist())))


def format_partition(g: Graph, p: Partition) -> str:
    buf = io.StringIO()
    write_partition_file(g, p, buf)
    return buf.getvalue()


def read_partition_file(g: Graph, source) -> Partition:
    """Read a partition file against ``g``'s external ids.

    Partition ids are compacted (sorted order preserved), so a file written by
    :func:`write_partition_file` reads back unchanged.
    """
    if isinstance(source, str) or hasattr(source, "__fspath__"):
        with open(source, "r", encoding="utf-8") as fh:
            return read_partition_file(g, fh)
    labels = np.full(g.n, -1, dtype=np.int64)
    for lineno, line in enumerate(source, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise PartitionFileError(f"line {lineno}: expected 'node_id partition_id'")
        try:
            node, block = int(parts[0]), int(parts[1])
        except ValueError:
            raise PartitionFileError(f"line {lineno}: non-integer field") from None
        if block < 0:
            raise PartitionFileError(f"line {lineno}: negative partition id")
        pos = int(np.searchsorted(g.ids, node))
        if pos >= g.n or g.ids[pos] != node:
            raise PartitionFileError(f"line {lineno}: node {node} is not in the graph", node)
        if labels[pos] >= 0:
            raise PartitionFileError(f"line {lineno}: node {node} assigned twice", node)
        labels[pos] = block
    missing = np.flatnonzero(labels < 0)
    if len(missing):
        node = int(g.ids[missing[0]])
        raise PartitionFileError(f"node {node} has no partition assignment", node)
    return Partition(labels).compact()

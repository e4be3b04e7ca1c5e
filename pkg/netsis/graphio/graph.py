"""Weighted directed graph container.

Convention: ``weights[i, j] = a_ij > 0`` means an edge FROM node j TO node i.
Row i therefore collects the in-edges of node i. Many tools store the
transpose; every constructor in this package converts to this convention.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterator

import networkx as nx
import numpy as np


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable weighted directed graph over nodes 0..n-1.

    Attributes:
        weights: n x n nonnegative matrix, ``weights[i, j]`` = weight of edge j -> i
        node_labels: External identifier of each internal node (defaults to 0..n-1)
    """

    weights: np.ndarray
    node_labels: tuple[int, ...] = field(default=())

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"weight matrix must be square, got shape {w.shape}")
        if w.shape[0] < 1:
            raise ValueError("graph must have at least one node")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        labels = tuple(int(v) for v in self.node_labels) if self.node_labels else tuple(range(w.shape[0]))
        if len(labels) != w.shape[0]:
            raise ValueError("node_labels must have one entry per node")
        object.__setattr__(self, "node_labels", labels)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(self.weights))

    def edges(self) -> Iterator[tuple[int, int, float]]:
        """Yield (src, dst, weight) sorted by (dst, src)."""
        dst_idx, src_idx = np.nonzero(self.weights)
        for dst, src in zip(dst_idx.tolist(), src_idx.tolist()):
            yield src, dst, float(self.weights[dst, src])

    def in_weight_sums(self) -> np.ndarray:
        """Row sums: total in-weight of each node."""
        return self.weights.sum(axis=1)

    def to_networkx(self) -> nx.DiGraph:
        """DiGraph with an edge src -> dst for every a_{dst,src} > 0."""
        g = nx.DiGraph()
        g.add_nodes_from(range(self.n))
        g.add_weighted_edges_from(self.edges())
        return g

    def fingerprint(self) -> str:
        """sha256 of the weight matrix bytes and labels."""
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.weights).tobytes())
        h.update(repr(self.node_labels).encode())
        return h.hexdigest()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.node_labels == other.node_labels and np.array_equal(self.weights, other.weights)

    def __hash__(self) -> int:
        return hash(self.fingerprint())

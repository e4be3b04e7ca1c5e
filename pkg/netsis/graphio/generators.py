"""Synthetic network generation and weight normalization."""

from __future__ import annotations

import numpy as np

from netsis.core.errors import ZeroInDegree
from netsis.graphio.graph import Graph


def random_strongly_connected(n: int, extra_edge_prob: float, seed: int) -> Graph:
    """Generate a seeded strongly connected digraph with unit weights.

    A directed Hamiltonian cycle through a random permutation of the nodes
    guarantees strong connectivity; every other ordered pair (no self-loops)
    then gets an edge with probability ``extra_edge_prob``. For n = 1 the
    graph is a single self-loop.

    Args:
        n: Number of nodes (>= 1)
        extra_edge_prob: Probability in [0, 1] of each non-cycle edge
        seed: Seed for numpy's default_rng

    Returns:
        Graph, a deterministic function of (n, extra_edge_prob, seed)
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 <= extra_edge_prob <= 1.0:
        raise ValueError(f"extra_edge_prob must lie in [0, 1], got {extra_edge_prob}")
    if n == 1:
        return Graph(np.ones((1, 1)))

    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    weights = np.zeros((n, n))
    # edge order[k] -> order[k+1] is stored at a[dst, src]
    weights[np.roll(order, -1), order] = 1.0

    extra = rng.random((n, n)) < extra_edge_prob
    np.fill_diagonal(extra, False)
    weights[extra] = 1.0
    return Graph(weights)


def normalize_in_weights(g: Graph) -> Graph:
    """Scale every row of the weight matrix to sum to one.

    Each node's in-weights are divided by their original total, so the zero
    pattern (and hence strong connectivity) is unchanged.

    Raises:
        ZeroInDegree: Some node has no incoming edge
    """
    sums = g.in_weight_sums()
    empty = np.flatnonzero(sums <= 0)
    if empty.size:
        node = int(empty[0])
        raise ZeroInDegree(f"node {g.node_labels[node]} has no incoming edges", node=g.node_labels[node])
    return Graph(g.weights / sums[:, None], g.node_labels)

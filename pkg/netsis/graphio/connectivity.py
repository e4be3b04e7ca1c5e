"""Strong connectivity and irreducibility checks."""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx
import numpy as np

from netsis.graphio.graph import Graph


@dataclass(frozen=True)
class SccAnalysis:
    """Strongly connected component decomposition of a Graph."""

    is_strongly_connected: bool
    components: list[frozenset[int]]  # sorted by smallest member
    largest_component_subgraph: Graph
    largest_component: frozenset[int]

    @property
    def component_sizes(self) -> list[int]:
        return [len(c) for c in self.components]


def strongly_connected_analysis(g: Graph) -> SccAnalysis:
    """Decompose a graph into strongly connected components.

    The largest component wins; ties go to the component holding the smallest
    node id. The induced subgraph keeps edge weights and the original node
    labels.

    Args:
        g: Graph to analyse

    Returns:
        SccAnalysis with components and the largest component's subgraph
    """
    components = sorted(
        (frozenset(c) for c in nx.strongly_connected_components(g.to_networkx())),
        key=min,
    )
    largest = max(components, key=lambda c: (len(c), -min(c)))
    nodes = sorted(largest)
    sub = Graph(g.weights[np.ix_(nodes, nodes)], tuple(g.node_labels[i] for i in nodes))
    return SccAnalysis(
        is_strongly_connected=len(components) == 1,
        components=components,
        largest_component_subgraph=sub,
        largest_component=largest,
    )


def is_irreducible(matrix: np.ndarray) -> bool:
    """True if the zero pattern of a square matrix is strongly connected."""
    m = np.asarray(matrix)
    if m.shape[0] == 1:
        # 1x1 matrices are irreducible by convention
        return True
    # only the zero pattern matters, so signs are dropped
    return nx.is_strongly_connected(Graph(np.abs(m)).to_networkx())

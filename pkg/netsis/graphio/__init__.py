"""Graph input/output, connectivity analysis, and synthetic networks."""

from netsis.graphio.connectivity import SccAnalysis, is_irreducible, strongly_connected_analysis
from netsis.graphio.edge_list import parse_edge_list, read_edge_list, serialize_edge_list, write_edge_list
from netsis.graphio.generators import normalize_in_weights, random_strongly_connected
from netsis.graphio.graph import Graph

__all__ = [
    "Graph",
    "SccAnalysis",
    "parse_edge_list",
    "read_edge_list",
    "serialize_edge_list",
    "write_edge_list",
    "strongly_connected_analysis",
    "is_irreducible",
    "random_strongly_connected",
    "normalize_in_weights",
]

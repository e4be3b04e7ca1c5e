"""Edge-list reading and writing.

Format: one edge per line, ``src dst [weight]``, whitespace separated,
0-based integer node ids, weight defaults to 1.0, ``#`` starts a comment.
A line ``src dst w`` stores ``a_{dst,src} = w`` (edge from src to dst).
"""

from __future__ import annotations

import io
import logging
from pathlib import Path
from typing import TextIO

import numpy as np

from netsis.core.config import DEFAULTS
from netsis.core.errors import EmptyGraph, MalformedLine, NegativeWeight
from netsis.graphio.graph import Graph

logger = logging.getLogger(__name__)


def _tokens(line: str) -> list[str]:
    return line.split("#", 1)[0].split()


def parse_edge_list(text: str | TextIO, relabel: bool = False) -> Graph:
    """Parse an edge list into a Graph.

    Duplicate edges accumulate their weights.

    Args:
        text: Edge-list content, either a string or an open text stream
        relabel: If True, map the sorted distinct ids to dense 0..n-1 and keep
            the original ids as node_labels. If False, n = 1 + max id seen.

    Returns:
        Parsed Graph

    Raises:
        EmptyGraph: No edges in the input
        NegativeWeight: A weight is below zero
        MalformedLine: Wrong token count or non-numeric token
    """
    stream = io.StringIO(text) if isinstance(text, str) else text

    triples: list[tuple[int, int, float]] = []
    for lineno, line in enumerate(stream, start=1):
        toks = _tokens(line)
        if not toks:
            continue
        if len(toks) not in (2, 3):
            raise MalformedLine(f"line {lineno}: expected 2 or 3 tokens, got {len(toks)}", line=lineno)
        try:
            src, dst = int(toks[0]), int(toks[1])
            weight = float(toks[2]) if len(toks) == 3 else 1.0
        except ValueError:
            raise MalformedLine(f"line {lineno}: non-numeric token in {line.strip()!r}", line=lineno) from None
        if src < 0 or dst < 0:
            raise MalformedLine(f"line {lineno}: node ids must be nonnegative", line=lineno)
        if not np.isfinite(weight):
            raise MalformedLine(f"line {lineno}: weight must be finite", line=lineno)
        if weight < 0:
            raise NegativeWeight(f"line {lineno}: negative weight {weight}", line=lineno, weight=weight)
        triples.append((src, dst, weight))

    if not triples:
        raise EmptyGraph("edge list contains no edges")

    if relabel:
        ids = sorted({t[0] for t in triples} | {t[1] for t in triples})
        index = {node: i for i, node in enumerate(ids)}
        labels = tuple(ids)
    else:
        max_id = max(max(t[0], t[1]) for t in triples)
        index = None
        labels = tuple(range(max_id + 1))

    weights = np.zeros((len(labels), len(labels)))
    for src, dst, weight in triples:
        if index is not None:
            src, dst = index[src], index[dst]
        weights[dst, src] += weight

    logger.debug("parsed %d edge lines over %d nodes", len(triples), len(labels))
    return Graph(weights, labels)


def read_edge_list(path: str | Path, relabel: bool = False) -> Graph:
    """Read an edge-list file from disk."""
    with Path(path).open(encoding="utf-8") as fh:
        return parse_edge_list(fh, relabel=relabel)


def serialize_edge_list(g: Graph) -> str:
    """Serialize a Graph to edge-list text.

    One edge per line sorted by (dst, src), external labels as ids, weights
    at 17 significant digits so re-parsing is lossless. Nodes without any
    nonzero edge are written as a zero-weight self-loop "k k 0" so the node
    count survives the round trip.
    """
    digits = DEFAULTS.FLOAT_DIGITS
    labels = g.node_labels
    lines = [f"# nodes={g.n} edges={g.edge_count}"]
    for src, dst, weight in g.edges():
        lines.append(f"{labels[src]} {labels[dst]} {weight:.{digits}g}")
    touched = (g.weights != 0).any(axis=0) | (g.weights != 0).any(axis=1)
    for node in np.flatnonzero(~touched).tolist():
        lines.append(f"{labels[node]} {labels[node]} 0")
    return "\n".join(lines) + "\n"


def write_edge_list(g: Graph, path: str | Path) -> None:
    """Write a Graph as an edge-list file."""
    Path(path).write_text(serialize_edge_list(g), encoding="utf-8")

"""Named sparsity patterns.

The hybrid network is a modelling choice: a star on nodes 0-3 centred at 0
with the spoke 0-3 extended to node 4 (1-based: edges 1-2, 1-3, 1-4, 4-5).
Five nodes and four edges, like the star and the line.
"""

from __future__ import annotations

from .game import GameError, SparsityPattern

HYBRID_EDGES = ((0, 1), (0, 2), (0, 3), (3, 4))
HYBRID_DESCRIPTION = (
    "hybrid = star on nodes {1,2,3,4} centred at 1 with spoke 1-4 extended to node 5; "
    "edges (1-based) 1-2, 1-3, 1-4, 4-5"
)
NAMED = ("full", "star", "line", "hybrid")


def star_edges(n: int):
    return [(0, j) for j in range(1, n)]


def line_edges(n: int):
    return [(i, i + 1) for i in range(n - 1)]


def parse_edges(text: str):
    """Parse ``"0-1,1-2"`` (0-based) into a list of pairs."""
    edges = []
    for chunk in text.replace(";", ",").split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            a, b = chunk.split("-")
            edges.append((int(a), int(b)))
        except ValueError as exc:
            raise GameError(f"bad edge {chunk!r}; expected 'i-j'") from exc
    return edges


def named_pattern(name: str, n: int, edges=None) -> SparsityPattern:
    if name == "full":
        return SparsityPattern.full(n)
    if name == "star":
        return SparsityPattern.from_edges(n, star_edges(n))
    if name == "line":
        return SparsityPattern.from_edges(n, line_edges(n))
    if name == "hybrid":
        if n != 5:
            raise GameError("the hybrid topology is defined for n = 5 only")
        return SparsityPattern.from_edges(n, HYBRID_EDGES)
    if name == "custom":
        if not edges:
            raise GameError("custom pattern needs an edge list")
        if isinstance(edges, str):
            edges = parse_edges(edges)
        return SparsityPattern.from_edges(n, edges)
    raise GameError(f"unknown topology {name!r}")

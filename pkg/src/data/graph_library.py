"""Small fixed graphs used by the verification suites, the demo and the tests.

Arrows are (tail, head); the last vertex is the base.
"""
from typing import Callable, Dict, List

try:
    from ..graphs.decorated_graph import DecoratedGraph
    from ..utils.errors import GraphError
except ImportError:
    from graphs.decorated_graph import DecoratedGraph
    from utils.errors import GraphError


def single_edge() -> DecoratedGraph:
    return DecoratedGraph.from_arrows(2, [(1, 2)])


def triangle() -> DecoratedGraph:
    return DecoratedGraph.from_arrows(3, [(1, 2), (2, 3), (1, 3)])


def banana() -> DecoratedGraph:
    """Two parallel edges."""
    return DecoratedGraph.from_arrows(2, [(1, 2), (1, 2)])


def theta() -> DecoratedGraph:
    return DecoratedGraph.from_arrows(2, [(1, 2), (1, 2), (1, 2)])


def path_tree(vertices: int = 3) -> DecoratedGraph:
    if vertices < 2:
        raise GraphError("a path needs at least two vertices")
    return DecoratedGraph.from_arrows(vertices, [(v, v + 1) for v in range(1, vertices)])


def chain_with_doubled_edge() -> DecoratedGraph:
    """A banana on vertices 1, 2 followed by the edge 2 -> 3."""
    return DecoratedGraph.from_arrows(3, [(1, 2), (1, 2), (2, 3)])


def square() -> DecoratedGraph:
    """The four-cycle; Laman at (1,2)."""
    return DecoratedGraph.from_arrows(4, [(1, 2), (2, 3), (3, 4), (1, 4)])


GRAPHS: Dict[str, Callable[[], DecoratedGraph]] = {
    "single_edge": single_edge,
    "triangle": triangle,
    "banana": banana,
    "theta": theta,
    "path_tree": path_tree,
    "chain_with_doubled_edge": chain_with_doubled_edge,
    "square": square,
}


def graph_names() -> List[str]:
    return sorted(GRAPHS)


def get_graph(name: str) -> DecoratedGraph:
    try:
        return GRAPHS[name]()
    except KeyError:
        raise GraphError(f"unknown library graph '{name}', expected one of {graph_names()}") from None

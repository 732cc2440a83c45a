from collections import Counter
from dataclasses import dataclass
from math import factorial
from typing import Tuple

import networkx as nx
from networkx.algorithms import isomorphism

from .combinatorics import contract_edge
from .decorated_graph import DecoratedGraph, betti_1

try:
    from ..utils.errors import GraphError
except ImportError:
    from utils.errors import GraphError

MAX_AUTOMORPHISM_VERTICES = 6
MAX_AUTOMORPHISM_EDGES = 8


@dataclass(frozen=True)
class StableGraph:
    """Multigraph with a genus per vertex and labeled external legs per vertex.

    Stability: genus-0 vertices have valency >= 3, genus-1 vertices >= 1.
    """

    underlying: DecoratedGraph
    genus: Tuple[int, ...]
    external_edges: Tuple[Tuple[int, ...], ...] = ()

    def __post_init__(self):
        n = self.underlying.vertex_count
        object.__setattr__(self, "genus", tuple(self.genus))
        legs = tuple(tuple(x) for x in self.external_edges) or tuple(() for _ in range(n))
        object.__setattr__(self, "external_edges", legs)
        if len(self.genus) != n or len(legs) != n:
            raise GraphError(f"genus and external legs need one entry per vertex ({n})")
        if any(g < 0 for g in self.genus):
            raise GraphError(f"vertex genera must be non-negative: {self.genus}")
        for v in range(1, n + 1):
            valency = self.valency(v)
            genus = self.genus[v - 1]
            if genus == 0 and valency < 3:
                raise GraphError(f"unstable: genus-0 vertex {v} has valency {valency} < 3")
            if genus == 1 and valency < 1:
                raise GraphError(f"unstable: genus-1 vertex {v} has valency 0")

    def valency(self, v: int) -> int:
        internal = sum((e.head == v) + (e.tail == v) for e in self.underlying.edges)
        return internal + len(self.external_edges[v - 1])


def stable_genus(sg: StableGraph) -> int:
    return betti_1(sg.underlying) + sum(sg.genus)


def _pair_multiplicities(g: DecoratedGraph) -> Counter:
    return Counter(frozenset((e.head, e.tail)) for e in g.edges)


def _quotient_graph(sg: StableGraph) -> nx.Graph:
    """Simple graph on the vertices; edge multiplicities and vertex data as attributes."""
    g = sg.underlying
    graph = nx.Graph()
    for v in range(1, g.vertex_count + 1):
        graph.add_node(v, genus=sg.genus[v - 1], legs=sg.external_edges[v - 1])
    for pair, count in _pair_multiplicities(g).items():
        ends = tuple(pair) if len(pair) == 2 else (next(iter(pair)),) * 2
        graph.add_edge(*ends, multiplicity=count)
    return graph


def automorphism_order(sg: StableGraph) -> int:
    """Undirected automorphisms preserving genus and fixing labeled legs.

    Each vertex automorphism contributes prod over vertex pairs of
    (multiplicity)! edge matchings, times 2 per self-loop for its orientation flip.
    """
    g = sg.underlying
    if g.vertex_count > MAX_AUTOMORPHISM_VERTICES or g.edge_count > MAX_AUTOMORPHISM_EDGES:
        raise GraphError(f"automorphism counting is capped at {MAX_AUTOMORPHISM_VERTICES} vertices and "
                         f"{MAX_AUTOMORPHISM_EDGES} edges, got {g.vertex_count} and {g.edge_count}")
    matchings = 1
    for pair, count in _pair_multiplicities(g).items():
        matchings *= factorial(count)
        if len(pair) == 1:
            matchings *= 2 ** count
    graph = _quotient_graph(sg)
    matcher = isomorphism.GraphMatcher(
        graph, graph,
        node_match=lambda a, b: a["genus"] == b["genus"] and a["legs"] == b["legs"],
        edge_match=lambda a, b: a["multiplicity"] == b["multiplicity"])
    count = sum(1 for _ in matcher.isomorphisms_iter())
    return count * matchings


def contract_stable_edge(sg: StableGraph, index: int) -> StableGraph:
    """Contract a non-loop edge; the merged vertex carries the sum of the genera."""
    result = contract_edge(sg.underlying, index)
    genus = [0] * result.graph.vertex_count
    legs = [[] for _ in range(result.graph.vertex_count)]
    for old, new in result.vertex_map.items():
        genus[new - 1] += sg.genus[old - 1]
        legs[new - 1].extend(sg.external_edges[old - 1])
    return StableGraph(result.graph, tuple(genus), tuple(tuple(sorted(x)) for x in legs))

"""Incidence matrices, spanning trees, cuts and edge contraction."""
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Set, Tuple

import networkx as nx
import numpy as np

from .decorated_graph import DecoratedGraph, Edge

try:
    from ..utils.errors import GraphError
except ImportError:
    from utils.errors import GraphError

EdgeSet = FrozenSet[int]


def incidence_matrix(g: DecoratedGraph) -> np.ndarray:
    """rho[e, v-1] = +1 at the head of e, -1 at its tail."""
    g.require_no_self_loops()
    rho = np.zeros((g.edge_count, g.vertex_count), dtype=int)
    for index, edge in enumerate(g.edges):
        rho[index, edge.head - 1] = 1
        rho[index, edge.tail - 1] = -1
    return rho


def reduced_incidence(g: DecoratedGraph) -> np.ndarray:
    """Incidence matrix with the base vertex column removed."""
    return incidence_matrix(g)[:, :-1]


@dataclass(frozen=True)
class SpanningTrees:
    trees: FrozenSet[EdgeSet]
    status: str  # "ok" or "disconnected"

    def __len__(self):
        return len(self.trees)

    def __iter__(self):
        return iter(sorted(self.trees, key=sorted))


def _forest_components(g: DecoratedGraph, kept: Iterable[int]):
    graph = g.to_networkx(kept)
    if not nx.is_forest(graph):
        return None
    return list(nx.connected_components(graph))


@lru_cache(maxsize=256)
def _spanning_trees(g: DecoratedGraph) -> SpanningTrees:
    if not g.is_connected():
        return SpanningTrees(frozenset(), "disconnected")
    trees = set()
    for subset in combinations(range(g.edge_count), g.vertex_count - 1):
        graph = g.to_networkx(subset)
        if nx.is_tree(graph):
            trees.add(frozenset(subset))
    return SpanningTrees(frozenset(trees), "ok")


def spanning_trees(g: DecoratedGraph) -> SpanningTrees:
    """All spanning trees by exhaustive search over (|V|-1)-edge subsets."""
    return _spanning_trees(g)


@lru_cache(maxsize=1024)
def _cut_sets(g: DecoratedGraph, v1: FrozenSet[int], v2: FrozenSet[int]) -> FrozenSet[EdgeSet]:
    size = g.edge_count - g.vertex_count + 2
    if size < 0:
        return frozenset()
    result = set()
    for cut in combinations(range(g.edge_count), size):
        kept = [i for i in range(g.edge_count) if i not in cut]
        components = _forest_components(g, kept)
        if components is None or len(components) != 2:
            continue
        first, second = components
        if (v1 <= first and v2 <= second) or (v1 <= second and v2 <= first):
            result.add(frozenset(cut))
    return frozenset(result)


def cut_sets(g: DecoratedGraph, v1: Iterable[int], v2: Iterable[int]) -> Set[EdgeSet]:
    """Edge sets whose removal leaves two trees, one holding v1 and one holding v2.

    Removing a cut leaves a two-tree forest, so every cut has exactly
    |E| - |V| + 2 edges and no cut contains another.
    """
    v1, v2 = frozenset(v1), frozenset(v2)
    if not v1 or not v2:
        raise GraphError("cut_sets needs two nonempty vertex sets")
    if v1 & v2:
        raise GraphError(f"cut_sets vertex sets overlap: {sorted(v1 & v2)}")
    return set(_cut_sets(g, v1, v2))


@dataclass(frozen=True)
class ContractionResult:
    graph: DecoratedGraph
    vertex_map: Dict[int, int]
    self_loops: Tuple[int, ...]

    @property
    def flagged(self) -> bool:
        return bool(self.self_loops)


def contract_edge(g: DecoratedGraph, index: int) -> ContractionResult:
    """Merge the endpoints of edge `index` and delete it.

    The merged vertex keeps the smaller label; labels above the larger
    endpoint shift down by one. Edges parallel to the contracted one
    become self-loops and are reported in `self_loops`.
    """
    if not 0 <= index < g.edge_count:
        raise GraphError(f"edge index {index} out of range 0..{g.edge_count - 1}")
    edge = g.edges[index]
    if edge.is_self_loop:
        raise GraphError(f"cannot contract self-loop edge {index}")
    keep, drop = min(edge.head, edge.tail), max(edge.head, edge.tail)
    vertex_map = {}
    for v in range(1, g.vertex_count + 1):
        if v == drop:
            vertex_map[v] = keep
        elif v > drop:
            vertex_map[v] = v - 1
        else:
            vertex_map[v] = v
    edges = []
    loops = []
    for i, e in enumerate(g.edges):
        if i == index:
            continue
        new = Edge(vertex_map[e.head], vertex_map[e.tail], e.decoration)
        if new.is_self_loop:
            loops.append(len(edges))
        edges.append(new)
    graph = DecoratedGraph(g.vertex_count - 1, tuple(edges), allow_self_loops=True)
    return ContractionResult(graph, vertex_map, tuple(loops))


def contract_subgraph(g: DecoratedGraph, edge_subset: Iterable[int]) -> ContractionResult:
    """Contract every edge of a connected edge subset into one vertex.

    The collapsed vertex keeps the smallest label of the subgraph.
    """
    subset = sorted(set(edge_subset))
    if not g.is_connected_subset(subset):
        raise GraphError(f"edge subset {subset} does not generate a connected subgraph")
    verts = set(g.vertices_of(subset))
    keep = min(verts)
    vertex_map = {}
    next_label = 1
    for v in range(1, g.vertex_count + 1):
        if v in verts and v != keep:
            continue
        vertex_map[v] = next_label
        next_label += 1
    for v in verts:
        vertex_map[v] = vertex_map[keep]
    edges = []
    loops = []
    for i, e in enumerate(g.edges):
        if i in subset:
            continue
        new = Edge(vertex_map[e.head], vertex_map[e.tail], e.decoration)
        if new.is_self_loop:
            loops.append(len(edges))
        edges.append(new)
    graph = DecoratedGraph(next_label - 1, tuple(edges), allow_self_loops=True)
    return ContractionResult(graph, vertex_map, tuple(loops))

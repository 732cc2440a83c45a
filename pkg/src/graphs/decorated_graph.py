from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

try:
    from ..utils.errors import GraphError
except ImportError:
    from utils.errors import GraphError


@dataclass(frozen=True)
class Signature:
    """Spacetime R^{d'} x C^d."""

    d: int
    d_prime: int

    def __post_init__(self):
        if self.d < 0 or self.d_prime < 0:
            raise GraphError(f"Signature needs non-negative (d, d'), got ({self.d}, {self.d_prime})")
        if self.d + self.d_prime < 1:
            raise GraphError("Signature needs d + d' >= 1")

    @property
    def total(self) -> int:
        return self.d + self.d_prime

    @property
    def heat_exponent(self) -> float:
        """n = d + d'/2, the power of t in the heat kernel normalization"""
        return self.d + self.d_prime / 2.0

    @property
    def real_dimension(self) -> int:
        return 2 * self.d + self.d_prime

    def __str__(self):
        return f"({self.d},{self.d_prime})"


@dataclass(frozen=True)
class Edge:
    head: int
    tail: int
    decoration: Tuple[int, ...] = ()

    @property
    def is_self_loop(self) -> bool:
        return self.head == self.tail

    def endpoints(self) -> FrozenSet[int]:
        return frozenset((self.head, self.tail))


@dataclass(frozen=True)
class DecoratedGraph:
    """Ordered directed multigraph; vertices are 1..vertex_count, edges are 0-based."""

    vertex_count: int
    edges: Tuple[Edge, ...] = ()
    allow_self_loops: bool = False

    def __post_init__(self):
        if self.vertex_count < 1:
            raise GraphError(f"vertex_count must be positive, got {self.vertex_count}")
        object.__setattr__(self, "edges", tuple(self.edges))
        for index, edge in enumerate(self.edges):
            for v in (edge.head, edge.tail):
                if not 1 <= v <= self.vertex_count:
                    raise GraphError(f"edge {index} references vertex {v} outside 1..{self.vertex_count}")
            if any(n < 0 for n in edge.decoration):
                raise GraphError(f"edge {index} has a negative decoration {edge.decoration}")
            if edge.is_self_loop and not self.allow_self_loops:
                raise GraphError(f"edge {index} is a self-loop at vertex {edge.head}")

    @classmethod
    def from_arrows(cls, vertex_count: int, arrows: Iterable[Tuple[int, int]],
                    decorations: Optional[Sequence[Sequence[int]]] = None,
                    allow_self_loops: bool = False) -> "DecoratedGraph":
        """Build from (tail, head) pairs, i.e. arrows tail -> head."""
        arrows = list(arrows)
        if decorations is None:
            decorations = [()] * len(arrows)
        edges = tuple(Edge(head=h, tail=t, decoration=tuple(n))
                      for (t, h), n in zip(arrows, decorations))
        return cls(vertex_count, edges, allow_self_loops)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def base_vertex(self) -> int:
        return self.vertex_count

    def has_self_loops(self) -> bool:
        return any(e.is_self_loop for e in self.edges)

    def require_no_self_loops(self):
        loops = [i for i, e in enumerate(self.edges) if e.is_self_loop]
        if loops:
            raise GraphError(f"self-loop edges {loops} are not allowed here")

    def to_networkx(self, edge_subset: Optional[Iterable[int]] = None,
                    all_vertices: bool = True) -> nx.MultiGraph:
        subset = range(self.edge_count) if edge_subset is None else edge_subset
        graph = nx.MultiGraph()
        if all_vertices:
            graph.add_nodes_from(range(1, self.vertex_count + 1))
        for index in subset:
            edge = self.edges[index]
            graph.add_edge(edge.tail, edge.head, key=index)
        return graph

    def is_connected(self) -> bool:
        return nx.is_connected(self.to_networkx())

    def components(self) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
        """Connected components as (sorted vertices, sorted edge indices)."""
        graph = self.to_networkx()
        result = []
        for nodes in sorted(nx.connected_components(graph), key=min):
            verts = tuple(sorted(nodes))
            edges = tuple(i for i, e in enumerate(self.edges) if e.head in nodes)
            result.append((verts, edges))
        return result

    def vertices_of(self, edge_subset: Iterable[int]) -> Tuple[int, ...]:
        verts = set()
        for index in edge_subset:
            verts |= self.edges[index].endpoints()
        return tuple(sorted(verts))

    def subgraph(self, edge_subset: Iterable[int]) -> Tuple["DecoratedGraph", Dict[int, int]]:
        """Subgraph generated by an edge subset, vertices relabeled 1..k in order.

        Returns the relabeled graph and the map old vertex -> new vertex.
        """
        edge_subset = sorted(edge_subset)
        if not edge_subset:
            raise GraphError("subgraph needs a nonempty edge subset")
        verts = self.vertices_of(edge_subset)
        relabel = {v: i + 1 for i, v in enumerate(verts)}
        edges = tuple(Edge(relabel[self.edges[i].head], relabel[self.edges[i].tail],
                           self.edges[i].decoration) for i in edge_subset)
        return DecoratedGraph(len(verts), edges, self.allow_self_loops), relabel

    def is_connected_subset(self, edge_subset: Iterable[int]) -> bool:
        edge_subset = list(edge_subset)
        if not edge_subset:
            return False
        return nx.is_connected(self.to_networkx(edge_subset, all_vertices=False))

    def reversed_edge(self, index: int) -> "DecoratedGraph":
        edges = list(self.edges)
        e = edges[index]
        edges[index] = Edge(head=e.tail, tail=e.head, decoration=e.decoration)
        return replace(self, edges=tuple(edges))

    def with_decoration(self, index: int, decoration: Sequence[int]) -> "DecoratedGraph":
        edges = list(self.edges)
        edges[index] = replace(edges[index], decoration=tuple(decoration))
        return replace(self, edges=tuple(edges))

    def with_zero_decorations(self, d: int) -> "DecoratedGraph":
        edges = tuple(replace(e, decoration=(0,) * d) for e in self.edges)
        return replace(self, edges=edges)

    def check_decorations(self, sig: Signature):
        for index, edge in enumerate(self.edges):
            if edge.decoration and len(edge.decoration) != sig.d:
                raise GraphError(
                    f"edge {index} decoration {edge.decoration} has length {len(edge.decoration)}, "
                    f"signature {sig} needs {sig.d}")

    def decoration(self, index: int, d: int) -> Tuple[int, ...]:
        """Decoration of an edge padded to length d (an empty decoration means zero)."""
        dec = self.edges[index].decoration
        return dec if dec else (0,) * d

    def edge_subsets(self, nonempty: bool = True) -> Iterable[Tuple[int, ...]]:
        start = 1 if nonempty else 0
        for size in range(start, self.edge_count + 1):
            yield from combinations(range(self.edge_count), size)


@dataclass(frozen=True)
class SchwingerPoint:
    """One positive Schwinger time per edge."""

    t: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "t", tuple(float(x) for x in self.t))
        bad = [i for i, x in enumerate(self.t) if not x > 0]
        if bad:
            raise GraphError(f"Schwinger parameters must be positive; edges {bad} are not")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.t, dtype=float)

    def __len__(self):
        return len(self.t)


def betti_1(g: DecoratedGraph) -> int:
    """First Betti number |E| - |V| + #components."""
    components = nx.number_connected_components(g.to_networkx())
    return g.edge_count - g.vertex_count + components

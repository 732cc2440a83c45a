"""Weighted Laplacian of a graph and the Kirchhoff-type formulas for it.

The last vertex is the base: M(t) is the reduced Laplacian on the vertices
1..|V|-1 with edge weights 1/t_e.
"""
from typing import Sequence

import numpy as np

from .combinatorics import cut_sets, reduced_incidence, spanning_trees
from .decorated_graph import DecoratedGraph, SchwingerPoint

try:
    from ..utils.errors import GraphError
except ImportError:
    from utils.errors import GraphError


def _times(g: DecoratedGraph, t) -> np.ndarray:
    if isinstance(t, SchwingerPoint):
        values = t.as_array()
    else:
        values = SchwingerPoint(tuple(np.atleast_1d(t))).as_array()
    if len(values) != g.edge_count:
        raise GraphError(f"need {g.edge_count} Schwinger parameters, got {len(values)}")
    return values


def _require_connected(g: DecoratedGraph):
    g.require_no_self_loops()
    if not g.is_connected():
        raise GraphError("graph is disconnected")


def weighted_laplacian(g: DecoratedGraph, t) -> np.ndarray:
    """M_ij = sum_e rho^e_i rho^e_j / t_e over non-base vertices."""
    _require_connected(g)
    rho = reduced_incidence(g).astype(float)
    return rho.T @ (rho / _times(g, t)[:, None])


def laplacian_from_weights(g: DecoratedGraph, weights: Sequence[float]) -> np.ndarray:
    """rho^T diag(weights) rho; weights may vanish (no positivity check)."""
    rho = reduced_incidence(g).astype(float)
    return rho.T @ (rho * np.asarray(weights, dtype=float)[:, None])


def spanning_tree_polynomial(g: DecoratedGraph, t) -> float:
    """sum over spanning trees T of prod_{e not in T} t_e."""
    times = _times(g, t)
    total = 0.0
    for tree in spanning_trees(g):
        total += float(np.prod([times[e] for e in range(g.edge_count) if e not in tree]))
    return total


def kirchhoff_det(g: DecoratedGraph, t) -> float:
    """det M(t) = (sum_T prod_{e not in T} t_e) / prod_e t_e."""
    _require_connected(g)
    times = _times(g, t)
    return spanning_tree_polynomial(g, times) / float(np.prod(times))


def _check_vertex(g: DecoratedGraph, i: int):
    if not 1 <= i <= g.vertex_count - 1:
        raise GraphError(f"vertex index {i} outside 1..{g.vertex_count - 1}")


def _cut_weight(g: DecoratedGraph, times: np.ndarray, v1, v2, skip: int = None) -> float:
    if set(v1) & set(v2):
        return 0.0
    total = 0.0
    for cut in cut_sets(g, v1, v2):
        total += float(np.prod([times[e] for e in cut if e != skip]))
    return total


def laplacian_inverse_entry(g: DecoratedGraph, t, i: int, j: int) -> float:
    """(M^{-1})^{ij} from the cut formula."""
    _require_connected(g)
    _check_vertex(g, i)
    _check_vertex(g, j)
    times = _times(g, t)
    numerator = _cut_weight(g, times, {i, j}, {g.base_vertex})
    return numerator / spanning_tree_polynomial(g, times)


def d_inverse_entry(g: DecoratedGraph, t, e: int, j: int) -> float:
    """(d^{-1})^{ej} = (1/t_e) sum_i rho^e_i (M^{-1})^{ij}, via cuts.

    Every numerator term also appears in the denominator, so the value is
    bounded by 2 in absolute value.
    """
    _require_connected(g)
    _check_vertex(g, j)
    if not 0 <= e < g.edge_count:
        raise GraphError(f"edge index {e} out of range 0..{g.edge_count - 1}")
    times = _times(g, t)
    edge = g.edges[e]
    base = g.base_vertex
    plus = _cut_weight(g, times, {j, edge.head}, {base, edge.tail}, skip=e)
    minus = _cut_weight(g, times, {j, edge.tail}, {base, edge.head}, skip=e)
    return (plus - minus) / spanning_tree_polynomial(g, times)


def d_inverse_matrix(g: DecoratedGraph, t) -> np.ndarray:
    """Dense numeric (1/t_e) rho M^{-1}, shape (|E|, |V|-1)."""
    times = _times(g, t)
    rho = reduced_incidence(g).astype(float)
    return (rho / times[:, None]) @ np.linalg.inv(weighted_laplacian(g, times))

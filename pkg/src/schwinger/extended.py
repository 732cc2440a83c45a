"""M^{-1} and d^{-1} entries evaluated in corner-chart coordinates.

The tree and cut formulas are ratios of sums of monomials prod t_e. In a
chart each monomial becomes rho^a times a product of xi's and free times;
dividing numerator and denominator by the smallest power of every rho_k
present in the denominator leaves a ratio that is finite at rho = 0.
"""
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .charts import CornerChart, chart_to_interior, edge_exponents

try:
    from ..graphs.combinatorics import cut_sets, spanning_trees
    from ..graphs.decorated_graph import DecoratedGraph
    from ..graphs.laplacian import d_inverse_entry, laplacian_inverse_entry
    from ..utils.errors import ChartError, GraphError
except ImportError:
    from graphs.combinatorics import cut_sets, spanning_trees
    from graphs.decorated_graph import DecoratedGraph
    from graphs.laplacian import d_inverse_entry, laplacian_inverse_entry
    from utils.errors import ChartError, GraphError


def _chart_monomial(chart: CornerChart, edges: Iterable[int]) -> Tuple[np.ndarray, float]:
    edges = list(edges)
    powers, _ = edge_exponents(chart.flag, edges)
    value = 1.0
    for e in edges:
        value *= chart.xi[e] if e in chart.xi else chart.t[e]
    return powers, value


def _reduced_ratio(chart: CornerChart, numerator: Sequence[Tuple[int, Sequence[int]]],
                   denominator: Sequence[Sequence[int]]) -> float:
    """sum_i sign_i prod t_{N_i} / sum_j prod t_{D_j} with common rho powers cancelled."""
    rho = np.asarray(chart.rho)
    den_terms = [_chart_monomial(chart, edges) for edges in denominator]
    if not den_terms:
        raise ChartError("empty denominator")
    floor = np.min(np.array([p for p, _ in den_terms]), axis=0) if chart.flag.depth else np.zeros(0, dtype=int)

    def reduced(powers: np.ndarray, value: float) -> float:
        shifted = powers - floor
        if np.any(shifted < 0):
            raise ChartError("numerator term is not dominated by the denominator")
        return value * float(np.prod(rho ** shifted))

    den = sum(reduced(p, v) for p, v in den_terms)
    num = sum(sign * reduced(*_chart_monomial(chart, edges)) for sign, edges in numerator)
    return num / den


def _tree_complements(g: DecoratedGraph) -> List[Tuple[int, ...]]:
    return [tuple(e for e in range(g.edge_count) if e not in tree) for tree in spanning_trees(g)]


def extended_m_inverse(g: DecoratedGraph, chart: CornerChart, i: int, j: int) -> float:
    """(M^{-1})^{ij}, finite on the boundary of the chart."""
    if not g.is_connected():
        raise GraphError("graph is disconnected")
    if chart.flag.edge_count != g.edge_count:
        raise ChartError("chart and graph have different edge counts")
    for v in (i, j):
        if not 1 <= v <= g.vertex_count - 1:
            raise GraphError(f"vertex index {v} outside 1..{g.vertex_count - 1}")
    if chart.is_interior:
        return laplacian_inverse_entry(g, chart_to_interior(chart), i, j)
    numerator = [(1, tuple(cut)) for cut in sorted(cut_sets(g, {i, j}, {g.base_vertex}), key=sorted)]
    return _reduced_ratio(chart, numerator, _tree_complements(g))


def _signed_cuts(g: DecoratedGraph, v1, v2, skip: int, sign: int):
    if set(v1) & set(v2):
        return []
    return [(sign, tuple(e for e in sorted(cut) if e != skip))
            for cut in sorted(cut_sets(g, v1, v2), key=sorted)]


def extended_d_inverse(g: DecoratedGraph, chart: CornerChart, e: int, j: int) -> float:
    """(d^{-1})^{ej}, finite and bounded by 2 on the whole chart."""
    if not g.is_connected():
        raise GraphError("graph is disconnected")
    if chart.flag.edge_count != g.edge_count:
        raise ChartError("chart and graph have different edge counts")
    if not 0 <= e < g.edge_count:
        raise GraphError(f"edge index {e} out of range")
    if chart.is_interior:
        return d_inverse_entry(g, chart_to_interior(chart), e, j)
    edge = g.edges[e]
    base = g.base_vertex
    numerator = (_signed_cuts(g, {j, edge.head}, {base, edge.tail}, e, 1)
                 + _signed_cuts(g, {j, edge.tail}, {base, edge.head}, e, -1))
    return _reduced_ratio(chart, numerator, _tree_complements(g))

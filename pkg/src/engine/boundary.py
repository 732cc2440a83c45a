"""Stokes on the compactified Schwinger box: the boundary identity and subgraph strata."""
import time
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from .anomaly import anomaly_functional, reduced_flux
from .integrals import w_0_L
from .problem import GraphIntegralProblem, TestSource
from .reducer import _parity, integral_sign

try:
    from ..forms.exterior import Form, Generator, coordinate
    from ..graphs.decorated_graph import DecoratedGraph, Edge
    from ..graphs.laman import is_laman
    from ..kernels.heat import position_symbols
    from ..schwinger.quadrature import IntegralResult
    from ..schwinger.strata import (BoundaryStratum, analytic_sign, boundary_strata, boundary_sum,
                                    stratum_integral, _sorting_sign)
    from ..utils.config import QuadratureSpec
    from ..utils.errors import GraphError
    from ..utils.logger import logger
except ImportError:
    from forms.exterior import Form, Generator, coordinate
    from graphs.decorated_graph import DecoratedGraph, Edge
    from graphs.laman import is_laman
    from kernels.heat import position_symbols
    from schwinger.quadrature import IntegralResult
    from schwinger.strata import (BoundaryStratum, analytic_sign, boundary_strata, boundary_sum,
                                  stratum_integral, _sorting_sign)
    from utils.config import QuadratureSpec
    from utils.errors import GraphError
    from utils.logger import logger

BOUNDARY_RTOL = 1e-3


def _agreement(left: IntegralResult, right: IntegralResult, scale: float) -> Tuple[float, bool]:
    discrepancy = abs(left.value - right.value)
    size = max(abs(left.value), abs(right.value))
    both_zero = left.is_zero(scale) and right.is_zero(scale)
    tolerance = max(BOUNDARY_RTOL * size, 3 * (left.error_estimate + right.error_estimate))
    return discrepancy, both_zero or discrepancy <= tolerance


@dataclass
class BoundaryReport:
    left: IntegralResult
    right: IntegralResult
    strata: List[IntegralResult]
    discrepancy: float
    passed: bool

    def per_stratum(self) -> Dict[str, complex]:
        return {s.label: s.value for s in self.strata}


def boundary_identity_check(problem: GraphIntegralProblem, quadrature: Optional[QuadratureSpec] = None,
                            jobs: int = 1) -> BoundaryReport:
    """(-1)^{m(d+d')} W_0^L((dbar + d) Phi) against (-1)^{|V| d'} times the boundary strata of W_0^L(Phi).

    Phi must reduce to an (m-1)-form; |V| counts the integrated vertices.
    """
    sig, m = problem.sig, problem.edge_count
    left_sign = -1 if (m * sig.total) % 2 else 1
    right_sign = -1 if (len(problem.vertices) * sig.d_prime) % 2 else 1
    differential = problem.with_source(problem.source.differential(sig, problem.vertices))
    left = w_0_L(differential, quadrature, jobs).scaled(left_sign)
    left.label = "W_0^L((dbar+d) Phi)"
    total, parts = boundary_sum(boundary_strata(problem.graph, problem.L), reduced_flux(problem, jobs), quadrature)
    right = total.scaled(right_sign)
    right.label = "boundary"
    discrepancy, passed = _agreement(left, right, left.details.get("scale", 0.0))
    logger.check_result(f"boundary identity ({m} edges, {sig})", passed, discrepancy,
                        max(BOUNDARY_RTOL * abs(left.value), 3 * (left.error_estimate + right.error_estimate)))
    return BoundaryReport(left, right, [p.scaled(right_sign) for p in parts], discrepancy, passed)


# subgraph strata


@dataclass
class SubgraphReduction:
    edges: Tuple[int, ...]
    laman: bool
    direct: IntegralResult
    factored: Optional[IntegralResult]
    status: str
    constants: Dict[str, complex] = field(default_factory=dict)

    @property
    def agrees(self) -> bool:
        if self.factored is None:
            return False
        tolerance = max(3 * (self.direct.error_estimate + self.factored.error_estimate),
                        BOUNDARY_RTOL * max(abs(self.direct.value), abs(self.factored.value)))
        return abs(self.direct.value - self.factored.value) <= tolerance


@dataclass(frozen=True)
class _Collapse:
    """Gamma' edges collapse onto the vertex `base`; `inner` are its other vertices."""

    edges: Tuple[int, ...]
    rest: Tuple[int, ...]
    base: int
    inner: Tuple[int, ...]
    outer: Tuple[int, ...]


def _collapse(graph: DecoratedGraph, edges: Sequence[int]) -> Optional[_Collapse]:
    edges = tuple(sorted(edges))
    rest = tuple(e for e in range(graph.edge_count) if e not in edges)
    inside = graph.vertices_of(edges)
    touched = sorted({v for e in rest for v in graph.edges[e].endpoints()} & set(inside))
    if len(touched) > 1:
        return None
    base = touched[0] if touched else max(inside)
    inner = tuple(v for v in inside if v != base)
    outer = tuple(v for v in range(1, graph.vertex_count + 1) if v not in inner)
    return _Collapse(edges, rest, base, inner, outer)


def _local_problem(problem: GraphIntegralProblem, c: _Collapse, alpha: Sequence[Tuple[int, int]]):
    """Gamma' with its collapse vertex as base and the relative source dz_inner y^alpha / alpha!."""
    sig = problem.sig
    relabel = {v: i + 1 for i, v in enumerate(c.inner)}
    relabel[c.base] = len(c.inner) + 1
    edges = tuple(Edge(relabel[problem.graph.edges[e].head], relabel[problem.graph.edges[e].tail],
                       problem.graph.edges[e].decoration) for e in c.edges)
    graph = DecoratedGraph(len(c.inner) + 1, edges)
    polynomial = sp.Integer(1)
    for (v, k), power in _counts(alpha).items():
        polynomial *= coordinate("z", relabel[v], k) ** power / factorial(power)
    gens = [Generator.of("z", relabel[v], k) for v in c.inner for k in range(1, sig.d + 1)]
    source = TestSource.gaussian(gens, polynomial, mode="relative")
    return GraphIntegralProblem(graph, sig, source, problem.L)


def _counts(alpha: Sequence[Tuple[int, int]]) -> Dict[Tuple[int, int], int]:
    counts: Dict[Tuple[int, int], int] = {}
    for slot in alpha:
        counts[slot] = counts.get(slot, 0) + 1
    return counts


def _contracted_problem(problem: GraphIntegralProblem, c: _Collapse,
                        alpha: Sequence[Tuple[int, int]]) -> Optional[GraphIntegralProblem]:
    """Gamma/Gamma' with the source sum_terms sign * d^alpha_y (coefficient) at y = 0."""
    sig, graph, source = problem.sig, problem.graph, problem.source
    relabel = {v: i + 1 for i, v in enumerate(c.outer)}
    edges = tuple(Edge(relabel[graph.edges[e].head], relabel[graph.edges[e].tail], graph.edges[e].decoration)
                  for e in c.rest)
    contracted = DecoratedGraph(len(c.outer), edges)

    exponent = source.exponent(sig, range(1, graph.vertex_count + 1))
    collapse = {}
    for v in c.inner:
        for own, target in zip(sum(position_symbols(sig, v), []), sum(position_symbols(sig, c.base), [])):
            collapse[own] = target
    rename = {}
    for v in c.outer:
        for own, target in zip(sum(position_symbols(sig, v), []), sum(position_symbols(sig, relabel[v]), [])):
            rename[own] = target
    inner_dz = [Generator.of("z", v, k) for v in c.inner for k in range(1, sig.d + 1)]

    terms = {}
    for key, coeff in source.polyform.terms.items():
        if not set(inner_dz) <= set(key):
            continue
        if any(g.index[0] in c.inner and g.kind != "z" for g in key):
            return None
        remaining = [g for g in key if g not in inner_dz]
        sign = _parity([key.index(g) for g in inner_dz + remaining])
        q = coeff
        for v, k in alpha:
            z = coordinate("z", v, k)
            q = sp.diff(q, z) + q * sp.diff(exponent, z)
        q = sp.expand(q.xreplace(collapse)).xreplace(rename)
        new_key = tuple(Generator.of(g.kind, relabel[g.index[0]], g.index[1]) for g in remaining)
        terms[new_key] = terms.get(new_key, 0) + sign * q

    widths = []
    for v in c.outer:
        members = [v] + (list(c.inner) if v == c.base else [])
        widths.append(float(1.0 / np.sqrt(sum(source.width(u) ** -2 for u in members))))
    contracted_source = TestSource(Form(terms), source.sigma, tuple(widths), "absolute")
    return GraphIntegralProblem(contracted, sig, contracted_source, problem.L)


def _jet_order(problem: GraphIntegralProblem, c: _Collapse) -> int:
    """The only holomorphic jet order the collapsed subgraph can see (scale invariance)."""
    d = problem.sig.d
    decorations = sum(sum(problem.graph.decoration(e, d)) for e in c.edges)
    return d * (len(c.edges) - len(c.inner)) + decorations


def _factored_sign(problem: GraphIntegralProblem, c: _Collapse) -> int:
    sig, m, k = problem.sig, problem.edge_count, len(c.edges)
    width = sig.total
    inversions = sum(1 for e in c.edges for f in c.rest if f < e)
    sign = integral_sign(sig, m) * integral_sign(sig, k) * integral_sign(sig, m - k)
    sign *= -1 if (width * inversions) % 2 else 1
    n_inner, n_outer = len(c.inner) * sig.d, len(c.outer) * sig.d
    sign *= -1 if (n_inner * n_outer) % 2 else 1
    sign *= -1 if ((m - k) * width * n_inner) % 2 else 1
    sign *= -1 if ((k - 1) * len(c.outer) * sig.real_dimension) % 2 else 1

    def top(vertices):
        return ([Generator.of("z", v, j) for v in vertices for j in range(1, sig.d + 1)]
                + [Generator.of("zbar", v, j) for v in vertices for j in range(1, sig.d + 1)]
                + [Generator.of("x", v, j) for v in vertices for j in range(1, sig.d_prime + 1)])

    produced = top(c.inner) + top(c.outer)
    canonical = sorted(produced)
    sign *= _parity([canonical.index(g) for g in produced])
    sign *= _sorting_sign(c.edges, c.rest)
    return -sign


def subgraph_boundary_reduction(problem: GraphIntegralProblem, edges: Sequence[int],
                                quadrature: Optional[QuadratureSpec] = None, jobs: int = 1) -> SubgraphReduction:
    """The origin stratum of an edge subset, directly and through O of the subgraph.

    The factored path needs an absolute source and a subgraph meeting the
    other edges in a single vertex; otherwise only the direct value is given.
    """
    quadrature = quadrature or QuadratureSpec()
    graph, sig = problem.graph, problem.sig
    edges = tuple(sorted(set(edges)))
    m = graph.edge_count
    if not edges or len(edges) >= m or any(not 0 <= e < m for e in edges):
        raise GraphError(f"{edges} is not a proper nonempty edge subset of {m} edges")
    start = time.time()
    stratum = BoundaryStratum("origin", edges, m, problem.L, analytic_sign("origin", edges, m))
    direct = stratum_integral(stratum, reduced_flux(problem, jobs), quadrature)
    subgraph, _ = graph.subgraph(edges)
    laman = is_laman(subgraph, sig)

    if not laman:
        factored = IntegralResult(0j, 0.0, 0, quadrature.seed, 0.0, "ok", "factored (O vanishes)")
        return SubgraphReduction(edges, laman, direct, factored, "non-Laman")

    c = _collapse(graph, edges)
    if c is None or problem.source.mode != "absolute":
        logger.info(f"subgraph {edges}: factored path not applicable, direct value only")
        return SubgraphReduction(edges, laman, direct, None, "direct-only")

    order = _jet_order(problem, c)
    slots = [(v, k) for v in c.inner for k in range(1, sig.d + 1)]
    alphas = list(combinations_with_replacement(slots, order)) if order >= 0 else []
    total = IntegralResult(0j, 0.0, 0, quadrature.seed, 0.0, "ok", "factored")
    constants: Dict[str, complex] = {}
    for alpha in alphas:
        constant = anomaly_functional(_local_problem(problem, c, alpha), quadrature, jobs)
        label = "C[" + ",".join(f"z{v}_{k}" for v, k in alpha) + "]"
        constants[label] = constant.value
        if constant.is_zero(constant.details.get("scale", 0.0)):
            continue
        contracted = _contracted_problem(problem, c, alpha)
        if contracted is None:
            return SubgraphReduction(edges, laman, direct, None, "direct-only", constants)
        outer = w_0_L(contracted, quadrature, jobs)
        value = constant.value * outer.value
        error = abs(constant.value) * outer.error_estimate + abs(outer.value) * constant.error_estimate
        total = total + IntegralResult(value, error, constant.nodes_used + outer.nodes_used, quadrature.seed)
    factored = total.scaled(_factored_sign(problem, c))
    factored.label = "factored"
    factored.runtime = time.time() - start
    report = SubgraphReduction(edges, laman, direct, factored, "factored", constants)
    logger.check_result(f"subgraph stratum {stratum.label}", report.agrees,
                        abs(direct.value - factored.value))
    return report

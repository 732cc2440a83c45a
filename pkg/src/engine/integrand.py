"""Symbolic graph integrand W~ = c prod_e d^{n(e)} P_{t_e} ^ Phi in t~ coordinates."""
from typing import Dict, Sequence

import numpy as np
import sympy as sp

from .problem import GraphIntegralProblem
from .reducer import compile_problem, integral_sign

try:
    from ..forms.exterior import Form, coordinate, pullback, wedge, wedge_all
    from ..kernels.heat import position_symbols
    from ..kernels.propagator import propagator_uv_form
    from ..wick.gaussian import GaussianSpec
except ImportError:
    from forms.exterior import Form, coordinate, pullback, wedge, wedge_all
    from kernels.heat import position_symbols
    from kernels.propagator import propagator_uv_form
    from wick.gaussian import GaussianSpec


def decorated_propagator(problem: GraphIntegralProblem, e: int) -> Form:
    """prod_k (-d/dz_{head,k})^{n_k} of the edge propagator; multiplies it by prod u_k^{n_k}."""
    edge = problem.graph.edges[e]
    form = propagator_uv_form(problem.sig, edge.head, edge.tail, edge=e)
    z_head, _, _ = position_symbols(problem.sig, edge.head)
    for k, power in enumerate(problem.graph.decoration(e, problem.sig.d)):
        for _ in range(power):
            form = form.map_coefficients(lambda c, s=z_head[k]: -sp.diff(c, s))
    return form


def build_integrand(problem: GraphIntegralProblem) -> Form:
    """The integrand in positions and t~_e (t_e = t~_e^2), before any integration.

    Relative sources pin the base vertex at the origin.
    """
    sig, graph = problem.sig, problem.graph
    product = wedge_all(decorated_propagator(problem, e) for e in range(problem.edge_count))
    form = wedge(product, problem.source.full_form(sig, problem.vertices)) * integral_sign(sig, problem.edge_count)

    substitution: Dict[sp.Symbol, sp.Expr] = {}
    for e in range(problem.edge_count):
        substitution[coordinate("t", e)] = coordinate("tt", e) ** 2
    for v in range(1, graph.vertex_count + 1):
        for symbol in sum(position_symbols(sig, v), []):
            pinned = problem.source.mode == "relative" and v == graph.vertex_count
            substitution[symbol] = sp.Integer(0) if pinned else symbol
    return pullback(form, substitution).expand()


def gaussian_spec(problem: GraphIntegralProblem, tt: Sequence[float]) -> GaussianSpec:
    """The Gaussian of the integrand at the node t~, in the reducer's variable order."""
    sig = problem.sig
    compiled = compile_problem(problem)
    A, B = compiled.matrices(np.asarray(tt, dtype=float) ** 2)
    pairs, reals = [], []
    for v in problem.vertices:
        z, zbar, x = position_symbols(sig, v)
        pairs += list(zip(z, zbar))
        reals += x
    return GaussianSpec(tuple(pairs), A, tuple(reals), B)


def at_node(integrand: Form, tt: Sequence[float]) -> Form:
    values = {coordinate("tt", e): sp.Float(float(v)) for e, v in enumerate(tt)}
    return integrand.map_coefficients(lambda c: c.xreplace(values))

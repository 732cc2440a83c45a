"""Codimension-one boundary strata of the compactified Schwinger box [0, sqrt L]^m.

An (m-1)-form on the box is handled through its flux field F:
omega = sum_e F_e i_{d/dt_e} vol. A scale face t~_e = sqrt L contributes
+int F_e; the origin stratum of an edge subset S (k edges) contributes
-lim_{r->0} r^{k-1} int_{S^{k-1}_+} int_rest sum_{e in S} xi_e F_e.
"""
import time
from dataclasses import dataclass
from itertools import combinations, product
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from .quadrature import (BoxDomain, IntegralResult, flux_components, integrate_form, richardson_limit,
                         sphere_patch_area, sphere_patch_quadrature, tensor_gauss_legendre)

try:
    from ..forms.exterior import Form, Generator, coordinate, exterior_derivative
    from ..graphs.decorated_graph import DecoratedGraph
    from ..utils.config import QuadratureSpec
    from ..utils.errors import GraphError
    from ..utils.logger import logger
except ImportError:
    from forms.exterior import Form, Generator, coordinate, exterior_derivative
    from graphs.decorated_graph import DecoratedGraph
    from utils.config import QuadratureSpec
    from utils.errors import GraphError
    from utils.logger import logger

FluxFunction = Callable[[np.ndarray], np.ndarray]

EXTRAPOLATION_TOL = 1e-3


def _sorting_sign(first: Sequence[int], second: Sequence[int]) -> int:
    """Sign of the permutation that sorts the concatenation first + second."""
    order = list(first) + list(second)
    sign = 1
    for i in range(len(order)):
        for j in range(i + 1, len(order)):
            if order[i] > order[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class BoundaryStratum:
    kind: str  # "origin" or "scale"
    edges: Tuple[int, ...]
    edge_count: int
    L: float
    sign: int

    @property
    def rest(self) -> Tuple[int, ...]:
        return tuple(e for e in range(self.edge_count) if e not in self.edges)

    @property
    def label(self) -> str:
        if self.kind == "scale":
            return f"scale[{self.edges[0]}]"
        return "origin{" + ",".join(map(str, self.edges)) + "}"

    def describe(self) -> str:
        if self.kind == "scale":
            return (f"t~_{self.edges[0]} = sqrt({self.L}) x (0, sqrt({self.L}))^{self.edge_count - 1}")
        k = len(self.edges)
        return f"S^{k - 1}_+ x (0, sqrt({self.L}))^{self.edge_count - k}"


def analytic_sign(kind: str, edges: Sequence[int], edge_count: int) -> int:
    """Stokes sign relative to the product orientation of the stratum.

    Scale face e: (-1)^{pos(e)} against dt~_{all but e}. Origin stratum S:
    -sign(sort(S, rest)) against (outward sphere orientation) x dt~_rest.
    """
    if kind == "scale":
        return -1 if edges[0] % 2 else 1
    rest = [e for e in range(edge_count) if e not in edges]
    return -_sorting_sign(sorted(edges), rest)


def boundary_strata(g: DecoratedGraph, L: float) -> List[BoundaryStratum]:
    """Origin strata for every nonempty edge subset, then one scale face per edge."""
    if not g.is_connected():
        raise GraphError("boundary strata need a connected graph")
    m = g.edge_count
    strata = []
    for size in range(1, m + 1):
        for subset in combinations(range(m), size):
            strata.append(BoundaryStratum("origin", subset, m, L, analytic_sign("origin", subset, m)))
    for e in range(m):
        strata.append(BoundaryStratum("scale", (e,), m, L, analytic_sign("scale", (e,), m)))
    return strata


def sign_table(strata: Sequence[BoundaryStratum]) -> Dict[str, int]:
    return {s.label: s.sign for s in strata}


def _scale_integral(stratum: BoundaryStratum, flux: FluxFunction, nodes: int) -> Tuple[complex, int]:
    e = stratum.edges[0]
    top = np.sqrt(stratum.L)
    rest_points, weights = tensor_gauss_legendre([(0.0, top)] * (stratum.edge_count - 1), nodes)
    points = np.zeros((len(weights), stratum.edge_count))
    for i, r in enumerate(stratum.rest):
        points[:, r] = rest_points[:, i]
    points[:, e] = top
    values = flux(points)[:, e]
    # against dt~_{rest} the face integral is int c = (-1)^{pos(e)} int F_e
    raw = (-1) ** e * complex(np.sum(weights * values))
    return stratum.sign * raw, len(weights)


def origin_limit_values(edges: Sequence[int], edge_count: int, flux: FluxFunction, xi: np.ndarray,
                        rest_points: np.ndarray, L: float, levels: int):
    """Pointwise lim_{r->0} r^{k-1} sum_e xi_e F_e at every (xi, rest) node pair.

    Returns (limits, extrapolation errors), each shaped (len(xi) * len(rest),).
    """
    k = len(edges)
    rest = [e for e in range(edge_count) if e not in edges]
    n_xi, n_rest = xi.shape[0], rest_points.shape[0]
    xi_rep = np.repeat(xi, n_rest, axis=0)
    rest_rep = np.tile(rest_points, (n_xi, 1))
    # radii shrink with s^2, s the smallest rest coordinate, so r / s -> 0 at the
    # nodes next to the faces t~_rest = 0
    start = np.full(n_xi * n_rest, 0.25 * min(1.0, np.sqrt(L)))
    if rest:
        start = start * (0.5 * np.minimum(1.0, rest_rep.min(axis=1))) ** 2
    samples = []
    for j in range(levels):
        r = start * 2.0 ** (-j)
        points = np.zeros((n_xi * n_rest, edge_count))
        for i, e in enumerate(edges):
            points[:, e] = r * xi_rep[:, i]
        for i, e in enumerate(rest):
            points[:, e] = rest_rep[:, i]
        values = flux(points)
        radial = sum(xi_rep[:, i] * values[:, e] for i, e in enumerate(edges))
        samples.append(r ** (k - 1) * radial)
    return richardson_limit(2.0, samples)


def _origin_integral(stratum: BoundaryStratum, flux: FluxFunction, quadrature: QuadratureSpec,
                     nodes: int, mc_samples: int) -> Tuple[complex, float, int]:
    edges = stratum.edges
    xi, xi_weights = sphere_patch_quadrature(len(edges), nodes, mc_samples, quadrature.seed)
    rest_points, rest_weights = tensor_gauss_legendre([(0.0, np.sqrt(stratum.L))] * len(stratum.rest), nodes)
    limits, errors = origin_limit_values(edges, stratum.edge_count, flux, xi, rest_points, stratum.L,
                                         quadrature.richardson_levels)
    weights = np.outer(xi_weights, rest_weights).ravel()
    # outward sphere flux times the product-orientation sign, then the Stokes sign
    raw = _sorting_sign(edges, stratum.rest) * complex(np.sum(weights * limits))
    extrapolation_error = float(np.sum(weights * np.abs(errors)))
    return stratum.sign * raw, extrapolation_error, len(weights)


def stratum_integral(stratum: BoundaryStratum, flux: FluxFunction,
                     quadrature: Optional[QuadratureSpec] = None) -> IntegralResult:
    """Signed contribution of one stratum to the Stokes boundary sum."""
    quadrature = quadrature or QuadratureSpec()
    coarse = quadrature.halved()
    start = time.time()
    if stratum.kind == "scale":
        value, used = _scale_integral(stratum, flux, quadrature.nodes_per_axis)
        coarse_value, _ = _scale_integral(stratum, flux, coarse.nodes_per_axis)
        error = abs(value - coarse_value)
        status = "ok"
    else:
        value, extrap_error, used = _origin_integral(stratum, flux, quadrature, quadrature.nodes_per_axis,
                                                     quadrature.mc_samples)
        coarse_value, _, _ = _origin_integral(stratum, flux, quadrature, coarse.nodes_per_axis,
                                              coarse.mc_samples)
        error = abs(value - coarse_value) + extrap_error
        status = "ok" if extrap_error <= EXTRAPOLATION_TOL * max(1.0, abs(value)) else "flagged"
        logger.extrapolation(f"stratum {stratum.label}", quadrature.richardson_levels, status)
    duration = time.time() - start
    logger.quadrature(f"stratum {stratum.label}", used, value, error, duration)
    return IntegralResult(value, error, used, quadrature.seed, duration, status, stratum.label)


def boundary_sum(strata: Sequence[BoundaryStratum], flux: FluxFunction,
                 quadrature: Optional[QuadratureSpec] = None) -> Tuple[IntegralResult, List[IntegralResult]]:
    parts = [stratum_integral(s, flux, quadrature) for s in strata]
    total = parts[0]
    for part in parts[1:]:
        total = total + part
    total.label = "boundary"
    return total, parts


def form_flux(form: Form, edge_count: int) -> FluxFunction:
    """Numeric flux field of an (m-1)-form in t~ coordinates."""
    edges = list(range(edge_count))
    symbols = [coordinate("tt", e) for e in edges]
    functions = {tuple(g.index[0] for g in key): sp.lambdify(symbols, coeff, modules="numpy")
                 for key, coeff in form.terms.items()}

    def flux(points: np.ndarray) -> np.ndarray:
        columns = [points[:, i] for i in range(edge_count)]
        coefficients = {key: np.broadcast_to(np.asarray(fn(*columns), dtype=complex), (points.shape[0],))
                        for key, fn in functions.items()}
        components = flux_components(coefficients, edges)
        return np.stack([np.broadcast_to(np.asarray(components[e], dtype=complex), (points.shape[0],))
                         for e in edges], axis=1)

    return flux


def form_from_flux(components: Sequence[sp.Expr], edge_count: int) -> Form:
    """omega = sum_e F_e i_{d/dt_e}(dt~_0 ... dt~_{m-1})."""
    terms = {}
    for e, component in enumerate(components):
        key = tuple(Generator.of("tt", f) for f in range(edge_count) if f != e)
        terms[key] = (-1) ** e * component
    return Form(terms)


def stokes_basket(edge_count: int) -> List[Form]:
    """Test (m-1)-forms: smooth ones fix the face signs, angular ones the corner signs."""
    t = [coordinate("tt", e) for e in range(edge_count)]
    forms = []
    for e in range(edge_count):
        components = [sp.Integer(0)] * edge_count
        components[e] = (1 + t[e] ** 2) * sp.Mul(*[(1 + t[f]) for f in range(edge_count) if f != e])
        forms.append(form_from_flux(components, edge_count))
    for size in range(2, edge_count + 1):
        for subset in combinations(range(edge_count), size):
            radius = sp.sqrt(sum(t[e] ** 2 for e in subset))
            rest_factor = 1 + sum(t[f] for f in range(edge_count) if f not in subset)
            components = [t[e] / radius ** size * rest_factor if e in subset else sp.Integer(0)
                          for e in range(edge_count)]
            forms.append(form_from_flux(components, edge_count))
    return forms


@dataclass
class SignFit:
    fitted: Dict[str, int]
    analytic: Dict[str, int]
    residual: float

    @property
    def agrees(self) -> bool:
        return self.fitted == self.analytic


def fit_sign_table(g: DecoratedGraph, L: float = 1.0, forms: Optional[Sequence[Form]] = None,
                   quadrature: Optional[QuadratureSpec] = None) -> SignFit:
    """Choose stratum signs minimizing sum |int d omega - boundary sum| over a basket of forms."""
    quadrature = quadrature or QuadratureSpec()
    m = g.edge_count
    strata = boundary_strata(g, L)
    forms = list(forms) if forms is not None else stokes_basket(m)
    box = BoxDomain.cube(range(m), 0.0, float(np.sqrt(L)))

    interiors = []
    raws = np.zeros((len(forms), len(strata)), dtype=complex)
    for i, omega in enumerate(forms):
        interiors.append(integrate_form(exterior_derivative(omega, ("tt",)), box, quadrature).value)
        flux = form_flux(omega, m)
        for j, stratum in enumerate(strata):
            # strip the analytic sign to get the product-orientation integral
            raws[i, j] = stratum.sign * stratum_integral(stratum, flux, quadrature).value
    interiors = np.asarray(interiors)

    best, best_residual = None, np.inf
    for signs in product((1, -1), repeat=len(strata)):
        residual = float(np.sum(np.abs(interiors - raws @ np.asarray(signs))))
        if residual < best_residual - 1e-12:
            best, best_residual = signs, residual
    fitted = {s.label: int(sign) for s, sign in zip(strata, best)}
    logger.check_result(f"sign table fit ({m} edges)", fitted == sign_table(strata), best_residual)
    return SignFit(fitted, sign_table(strata), best_residual)

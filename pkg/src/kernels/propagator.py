"""Schwinger-space propagator P_t = -dt (dbar* + d*) H + H.

An edge joins a head vertex z to a tail vertex w; the kernel is evaluated
at the difference z - w.
"""
from typing import Dict

import sympy as sp

from .heat import heat_kernel_form, position_symbols

try:
    from ..forms.exterior import (Form, Generator, coordinate, contract, exterior_derivative,
                                  pullback, wedge, wedge_all)
    from ..graphs.decorated_graph import Signature
except ImportError:
    from forms.exterior import (Form, Generator, coordinate, contract, exterior_derivative,
                                pullback, wedge, wedge_all)
    from graphs.decorated_graph import Signature


def dbar_star(sig: Signature, form: Form, vertex: int = 1) -> Form:
    """-2 sum_k d/dz_k i_{d/dzbar_k}"""
    result = Form.zero()
    z, _, _ = position_symbols(sig, vertex)
    for k in range(1, sig.d + 1):
        inner = contract(form, {Generator.of("zbar", vertex, k): 1})
        result = result + inner.map_coefficients(lambda c, s=z[k - 1]: -2 * sp.diff(c, s))
    return result


def d_star(sig: Signature, form: Form, vertex: int = 1) -> Form:
    """-sum_k d/dx_k i_{d/dx_k}"""
    result = Form.zero()
    _, _, x = position_symbols(sig, vertex)
    for k in range(1, sig.d_prime + 1):
        inner = contract(form, {Generator.of("x", vertex, k): 1})
        result = result + inner.map_coefficients(lambda c, s=x[k - 1]: -sp.diff(c, s))
    return result


def point_propagator(sig: Signature, vertex: int = 1, edge: int = 0) -> Form:
    """P_t at a single point: the definition before moving to differences."""
    heat = heat_kernel_form(sig, vertex, edge)
    codifferential = dbar_star(sig, heat, vertex) + d_star(sig, heat, vertex)
    dt = Form.one_form(Generator.of("t", edge))
    return heat - wedge(dt, codifferential)


def difference_substitution(sig: Signature, point: int, head: int, tail: int, edge: int) -> Dict:
    """Coordinates of `point` replaced by head - tail; t_edge kept."""
    substitution = {coordinate("t", edge): coordinate("t", edge)}
    for kind, count in (("z", sig.d), ("zbar", sig.d), ("x", sig.d_prime)):
        for k in range(1, count + 1):
            substitution[coordinate(kind, point, k)] = coordinate(kind, head, k) - coordinate(kind, tail, k)
    return substitution


def schwinger_propagator(sig: Signature, head: int = 1, tail: int = 2, edge: int = 0) -> Form:
    """P_t(z - w) as a Form in the coordinates of both endpoints and t_edge."""
    # Build at an auxiliary vertex 0 so the substitution never aliases an endpoint.
    base = point_propagator(sig, vertex=0, edge=edge)
    return pullback(base, difference_substitution(sig, 0, head, tail, edge))


def propagator_uv_form(sig: Signature, head: int = 1, tail: int = 2, edge: int = 0) -> Form:
    """pi^{-(d+d'/2)} exp(-(z-w).u - v.v) d^d u d^{d'} v pulled back along
    u = (zbar - wbar)/(2t), v = (x - y)/(2 sqrt t)."""
    n = sp.Integer(sig.d) + sp.Rational(sig.d_prime, 2)
    t = coordinate("t", edge)
    u = [coordinate("u", edge, k) for k in range(1, sig.d + 1)]
    v = [coordinate("v", edge, k) for k in range(1, sig.d_prime + 1)]
    zh, zbh, xh = position_symbols(sig, head)
    zt, zbt, xt = position_symbols(sig, tail)
    exponent = -sum((a - b) * c for a, b, c in zip(zh, zt, u)) - sum(c ** 2 for c in v)
    gens = ([Generator.of("u", edge, k) for k in range(1, sig.d + 1)]
            + [Generator.of("v", edge, k) for k in range(1, sig.d_prime + 1)])
    model = Form.monomial(gens, sp.exp(exponent) / sp.pi ** n)
    substitution = {t: t}
    for a, b in zip(zh + zt, zh + zt):
        substitution[a] = b
    for k, s in enumerate(u):
        substitution[s] = (zbh[k] - zbt[k]) / (2 * t)
    for k, s in enumerate(v):
        substitution[s] = (xh[k] - xt[k]) / (2 * sp.sqrt(t))
    return pullback(model, substitution)


def total_differential(form: Form) -> Form:
    """(d_t + dbar + d_deRham) on Schwinger and position variables."""
    return exterior_derivative(form, ("t", "zbar", "x"))


def euler_field(sig: Signature, vertices, edge: int = 0, displayed: bool = False) -> Dict[Generator, sp.Expr]:
    """Generator of the scaling t -> lt, zbar -> l zbar, x -> sqrt(l) x.

    `displayed=True` uses weight 1 on the real directions instead of 1/2;
    that field annihilates P_t only when d' = 0.
    """
    x_weight = sp.Integer(1) if displayed else sp.Rational(1, 2)
    field = {Generator.of("t", edge): coordinate("t", edge)}
    for vertex in vertices:
        _, zbar, x = position_symbols(sig, vertex)
        for k, s in enumerate(zbar, start=1):
            field[Generator.of("zbar", vertex, k)] = s
        for k, s in enumerate(x, start=1):
            field[Generator.of("x", vertex, k)] = x_weight * s
    return field


def euler_contraction(sig: Signature, head: int = 1, tail: int = 2, edge: int = 0,
                      displayed: bool = False) -> Form:
    propagator = schwinger_propagator(sig, head, tail, edge)
    return contract(propagator, euler_field(sig, (head, tail), edge, displayed))

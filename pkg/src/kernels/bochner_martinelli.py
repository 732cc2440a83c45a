"""Generalized Bochner-Martinelli kernel and the regularized ordinary propagator.

Both are (d+d'-1)-forms sum_k (-1)^{k-1} b_k omitted_k, where omitted_k drops
the k-th generator of dzbar_1..dzbar_d dx_1..dx_{d'}.

The time integral of (dbar* + d*)H gives
    b = 2^d Gamma(n) / (pi^n R^n) * (zbar_1, ..., zbar_d, x_1/2, ..., x_{d'}/2)
with n = d + d'/2 and R = 2|z|^2 + |x|^2. The displayed closed form carries
x_j instead of x_j/2; `normalization="displayed"` reproduces it.
"""
from typing import Callable, List

import numpy as np
import sympy as sp
from scipy import integrate, special

from .heat import SpacetimePoint, heat_kernel_value, volume_generators

try:
    from ..forms.exterior import Form
    from ..graphs.decorated_graph import Signature
    from ..utils.errors import KernelError
    from ..utils.logger import logger
except ImportError:
    from forms.exterior import Form
    from graphs.decorated_graph import Signature
    from utils.errors import KernelError
    from utils.logger import logger

NORMALIZATIONS = ("heat", "displayed")


def _component_weights(sig: Signature, p: SpacetimePoint, normalization: str) -> np.ndarray:
    if normalization not in NORMALIZATIONS:
        raise KernelError(f"unknown normalization '{normalization}', expected {NORMALIZATIONS}")
    x_weight = 0.5 if normalization == "heat" else 1.0
    return np.array([v.conjugate() for v in p.z] + [x_weight * v for v in p.x], dtype=complex)


def bochner_martinelli_components(sig: Signature, p: SpacetimePoint,
                                  normalization: str = "heat") -> np.ndarray:
    """The vector b (without the alternating signs)."""
    p.check(sig)
    radius = p.radius_form()
    if radius == 0:
        raise KernelError("Bochner-Martinelli kernel is singular at the origin")
    n = sig.heat_exponent
    prefactor = 2.0 ** sig.d * special.gamma(n) / (np.pi ** n * radius ** n)
    return prefactor * _component_weights(sig, p, normalization)


def _as_form(sig: Signature, components: np.ndarray, vertex: int) -> Form:
    gens = volume_generators(sig, vertex)
    terms = {}
    for k, value in enumerate(components):
        omitted = tuple(g for j, g in enumerate(gens) if j != k)
        sign = -1 if k % 2 else 1
        terms[omitted] = sign * sp.sympify(complex(value))
    return Form(terms)


def bochner_martinelli(sig: Signature, p: SpacetimePoint, normalization: str = "heat",
                       vertex: int = 1) -> Form:
    return _as_form(sig, bochner_martinelli_components(sig, p, normalization), vertex)


def _time_integral_quad(sig: Signature, p: SpacetimePoint, eps: float, L: float) -> float:
    """int_eps^L H(t, p) / t dt, adaptive in log t."""

    def integrand(s):
        t = np.exp(s)
        return heat_kernel_value(sig, t, p)

    radius = p.radius_form()
    peak = np.log(radius / (4.0 * sig.heat_exponent)) if radius > 0 else None
    lo, hi = np.log(eps), np.log(L)
    points = [peak] if peak is not None and lo < peak < hi else None
    value, _ = integrate.quad(integrand, lo, hi, points=points, limit=400,
                              epsabs=0.0, epsrel=1e-12)
    return value


def _time_integral_gamma(sig: Signature, p: SpacetimePoint, eps: float, L: float) -> float:
    n = sig.heat_exponent
    a = p.radius_form() / 4.0
    norm = 1.0 / (2.0 ** sig.total * np.pi ** n)
    if a == 0:
        return norm * (eps ** -n - L ** -n) / n
    return norm * a ** -n * special.gamma(n) * (special.gammainc(n, a / eps) - special.gammainc(n, a / L))


def regularized_propagator_components(sig: Signature, eps: float, L: float, p: SpacetimePoint,
                                      method: str = "quad") -> np.ndarray:
    if not 0 < eps:
        raise KernelError(f"regularized propagator needs eps > 0, got {eps}")
    if eps > L:
        raise KernelError(f"regularized propagator needs eps <= L, got eps={eps}, L={L}")
    p.check(sig)
    if eps == L:
        return np.zeros(sig.total, dtype=complex)
    if method == "quad":
        scalar = _time_integral_quad(sig, p, eps, L)
    elif method == "gamma":
        scalar = _time_integral_gamma(sig, p, eps, L)
    else:
        raise KernelError(f"unknown time-integration method '{method}'")
    # (dbar* + d*)H = H/t * (zbar_k, x_j / 2) on the omitted-generator basis
    return scalar * _component_weights(sig, p, "heat")


def regularized_propagator(sig: Signature, eps: float, L: float, p: SpacetimePoint,
                           method: str = "quad", vertex: int = 1) -> Form:
    return _as_form(sig, regularized_propagator_components(sig, eps, L, p, method), vertex)


def _sphere_parametrization(dim: int):
    """(ranges, map angles -> unit vector, jacobian) for S^{dim-1}, dim <= 3."""
    if dim == 2:
        return [(0.0, 2 * np.pi)], lambda a: np.array([np.cos(a[0]), np.sin(a[0])]), lambda a: 1.0
    if dim == 3:
        return ([(0.0, np.pi), (0.0, 2 * np.pi)],
                lambda a: np.array([np.sin(a[0]) * np.cos(a[1]), np.sin(a[0]) * np.sin(a[1]), np.cos(a[0])]),
                lambda a: np.sin(a[0]))
    raise KernelError(f"no sphere parametrization for dimension {dim}")


def green_pairing(sig: Signature, sigma: float = 1.0, normalization: str = "heat") -> float:
    """<(dbar + d) P, phi> for phi = exp(-(|z|^2 + |x|^2)/sigma^2).

    Computed as -int sum_k b_k d_k phi over R^{2d+d'} in spherical
    coordinates; Green's identity makes this phi(0) = 1.
    """
    dim = sig.real_dimension
    if dim > 3:
        raise KernelError(f"green_pairing supports real dimension <= 3, got {dim}")

    def density(point: np.ndarray) -> float:
        p = SpacetimePoint.from_euclidean(sig, point)
        b = bochner_martinelli_components(sig, p, normalization)
        phi = np.exp(-float(point @ point) / sigma ** 2)
        # d phi / d zbar_k = -z_k phi / sigma^2, d phi / d x_j = -2 x_j phi / sigma^2
        pairing = sum(b[k] * p.z[k] for k in range(sig.d))
        pairing += sum(2.0 * b[sig.d + j] * p.x[j] for j in range(sig.d_prime))
        return float(np.real(pairing)) * phi / sigma ** 2

    r_max = 8.0 * sigma
    if dim == 1:
        total = 0.0
        for direction in (-1.0, 1.0):
            value, _ = integrate.quad(lambda r: density(np.array([direction * r])), 0.0, r_max,
                                      epsabs=1e-12, epsrel=1e-10)
            total += value
        return total

    ranges, unit, jacobian = _sphere_parametrization(dim)

    def integrand(r, *angles):
        return density(r * unit(angles)) * r ** (dim - 1) * jacobian(angles)

    value, _ = integrate.nquad(integrand, [(0.0, r_max)] + ranges, opts={"epsabs": 1e-10, "epsrel": 1e-8})
    logger.debug(f"green_pairing {sig} sigma={sigma} normalization={normalization}: {value:.10f}")
    return value

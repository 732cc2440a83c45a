"""Heat kernel on R^{d'} x C^d, as a Form and as a numeric function."""
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
import sympy as sp

try:
    from ..forms.exterior import Form, Generator, coordinate
    from ..graphs.decorated_graph import Signature
    from ..utils.errors import KernelError
except ImportError:
    from forms.exterior import Form, Generator, coordinate
    from graphs.decorated_graph import Signature
    from utils.errors import KernelError


@dataclass(frozen=True)
class SpacetimePoint:
    z: Tuple[complex, ...] = ()
    x: Tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(complex(v) for v in self.z))
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))

    def check(self, sig: Signature):
        if len(self.z) != sig.d or len(self.x) != sig.d_prime:
            raise KernelError(f"point has shape ({len(self.z)}, {len(self.x)}), signature needs {sig}")

    def radius_form(self) -> float:
        """R = 2|z|^2 + |x|^2"""
        return 2.0 * sum(abs(v) ** 2 for v in self.z) + sum(v * v for v in self.x)

    def euclidean(self) -> np.ndarray:
        """(Re z_1, Im z_1, ..., x_1, ...)"""
        parts = []
        for v in self.z:
            parts.extend([v.real, v.imag])
        parts.extend(self.x)
        return np.asarray(parts, dtype=float)

    @classmethod
    def from_euclidean(cls, sig: Signature, p: Sequence[float]) -> "SpacetimePoint":
        p = list(p)
        z = [complex(p[2 * k], p[2 * k + 1]) for k in range(sig.d)]
        return cls(tuple(z), tuple(p[2 * sig.d:]))


def position_symbols(sig: Signature, vertex: int):
    z = [coordinate("z", vertex, k) for k in range(1, sig.d + 1)]
    zbar = [coordinate("zbar", vertex, k) for k in range(1, sig.d + 1)]
    x = [coordinate("x", vertex, k) for k in range(1, sig.d_prime + 1)]
    return z, zbar, x


def volume_generators(sig: Signature, vertex: int):
    """d^d zbar d^{d'} x of one vertex, in canonical order."""
    return ([Generator.of("zbar", vertex, k) for k in range(1, sig.d + 1)]
            + [Generator.of("x", vertex, k) for k in range(1, sig.d_prime + 1)])


def heat_coefficient_expr(sig: Signature, t, z, zbar, x) -> sp.Expr:
    n = sp.Integer(sig.d) + sp.Rational(sig.d_prime, 2)
    radius = 2 * sum(a * b for a, b in zip(z, zbar)) + sum(v ** 2 for v in x)
    return sp.exp(-radius / (4 * t)) / (2 ** sig.total * (sp.pi * t) ** n)


def heat_kernel_form(sig: Signature, vertex: int = 1, edge: int = 0) -> Form:
    """H(t, z, x) d^d zbar d^{d'} x with symbolic t = t_edge and coordinates of `vertex`."""
    z, zbar, x = position_symbols(sig, vertex)
    t = coordinate("t", edge)
    return Form.monomial(volume_generators(sig, vertex), heat_coefficient_expr(sig, t, z, zbar, x))


def heat_kernel_value(sig: Signature, t: float, p: SpacetimePoint) -> float:
    if t <= 0:
        raise KernelError(f"heat kernel needs t > 0, got {t}")
    n = sig.heat_exponent
    return float(np.exp(-p.radius_form() / (4.0 * t)) / (2.0 ** sig.total * (np.pi * t) ** n))


def heat_kernel(sig: Signature, t: float, p: SpacetimePoint, vertex: int = 1) -> Form:
    """Heat kernel at a numeric point, as a constant-coefficient Form."""
    p.check(sig)
    value = heat_kernel_value(sig, t, p)
    return Form.monomial(volume_generators(sig, vertex), sp.Float(value, 17))


def _real_widths(sig: Signature, t: float) -> np.ndarray:
    """Per Euclidean coordinate c with H ~ exp(-y^2 / c)."""
    return np.array([2.0 * t] * (2 * sig.d) + [4.0 * t] * sig.d_prime)


def _hermite_grid(dim: int, nodes: int):
    y, w = np.polynomial.hermite.hermgauss(nodes)
    grids = np.meshgrid(*([y] * dim), indexing="ij")
    weights = np.ones_like(grids[0])
    for axis_weights in np.meshgrid(*([w] * dim), indexing="ij"):
        weights = weights * axis_weights
    return [g.ravel() for g in grids], weights.ravel()


def heat_kernel_mass(sig: Signature, t: float, nodes: int = 6) -> float:
    """Lebesgue integral of the heat kernel coefficient (Gauss-Hermite)."""
    if t <= 0:
        raise KernelError(f"heat kernel needs t > 0, got {t}")
    dim = sig.real_dimension
    scale = np.sqrt(_real_widths(sig, t))
    grid, weights = _hermite_grid(dim, nodes)
    total = 0.0
    for i in range(len(weights)):
        p = np.array([grid[k][i] for k in range(dim)]) * scale
        value = heat_kernel_value(sig, t, SpacetimePoint.from_euclidean(sig, p))
        # undo the Hermite weight exp(-y^2)
        y2 = sum(grid[k][i] ** 2 for k in range(dim))
        total += weights[i] * value * np.exp(y2)
    return float(total * np.prod(scale))


def heat_semigroup_defect(sig: Signature, s: float, t: float, p: SpacetimePoint, nodes: int = 8) -> float:
    """|(H_s * H_t)(p) - H_{s+t}(p)| with the convolution by Gauss-Hermite.

    Each Euclidean coordinate of the integrand is Gaussian, so the rule is
    centred at q0 = p t/(s+t) with the exact combined width.
    """
    p.check(sig)
    dim = sig.real_dimension
    target = p.euclidean()
    c = _real_widths(sig, 1.0)
    center = target * t / (s + t)
    scale = np.sqrt(c * s * t / (s + t))
    grid, weights = _hermite_grid(dim, nodes)
    total = 0.0
    for i in range(len(weights)):
        y = np.array([grid[k][i] for k in range(dim)])
        q = center + y * scale
        h_s = heat_kernel_value(sig, s, SpacetimePoint.from_euclidean(sig, target - q))
        h_t = heat_kernel_value(sig, t, SpacetimePoint.from_euclidean(sig, q))
        total += weights[i] * h_s * h_t * np.exp(float(y @ y))
    convolution = total * float(np.prod(scale))
    return abs(convolution - heat_kernel_value(sig, s + t, p))


def spacetime_orientation_factor(n_complex: int) -> complex:
    """dz_1..dz_n dzbar_1..dzbar_n = (-1)^{n(n-1)/2} (-2i)^n da_1 db_1 ... da_n db_n"""
    sign = -1 if (n_complex * (n_complex - 1) // 2) % 2 else 1
    return sign * (-2j) ** n_complex

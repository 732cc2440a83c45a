"""Quadrature on Schwinger boxes, boundary faces and positive sphere patches."""
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np
import sympy as sp
from scipy import special

from .charts import Flag

try:
    from ..forms.exterior import Form, Generator, coordinate, pullback
    from ..utils.config import QuadratureSpec
    from ..utils.errors import FormError
    from ..utils.logger import logger
except ImportError:
    from forms.exterior import Form, Generator, coordinate, pullback
    from utils.config import QuadratureSpec
    from utils.errors import FormError
    from utils.logger import logger


@dataclass
class IntegralResult:
    value: complex
    error_estimate: float
    nodes_used: int = 0
    seed: Optional[int] = None
    runtime: float = 0.0
    status: str = "ok"
    label: str = ""
    details: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.value = complex(self.value)
        self.error_estimate = abs(float(self.error_estimate))

    def is_zero(self, scale: float = 0.0) -> bool:
        """Numerical zero: |value| <= max(3 error, 1e-6 scale)."""
        return abs(self.value) <= max(3.0 * self.error_estimate, 1e-6 * scale)

    def to_record(self, include_time: bool = True) -> Dict[str, Any]:
        record = {
            "label": self.label,
            "value_re": self.value.real,
            "value_im": self.value.imag,
            "error": self.error_estimate,
            "nodes": self.nodes_used,
            "seed": self.seed,
            "status": self.status,
        }
        if include_time:
            record["wall_time"] = round(self.runtime, 6)
        for key in sorted(self.details):
            record[key] = self.details[key]
        return record

    def __add__(self, other: "IntegralResult") -> "IntegralResult":
        status = "ok" if self.status == other.status == "ok" else "flagged"
        return IntegralResult(self.value + other.value, self.error_estimate + other.error_estimate,
                              self.nodes_used + other.nodes_used, self.seed,
                              self.runtime + other.runtime, status, self.label)

    def scaled(self, factor: complex) -> "IntegralResult":
        return IntegralResult(factor * self.value, abs(factor) * self.error_estimate, self.nodes_used,
                              self.seed, self.runtime, self.status, self.label, dict(self.details))


def gauss_legendre(nodes: int, a: float, b: float) -> Tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(nodes)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def tensor_gauss_legendre(bounds: Sequence[Tuple[float, float]], nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """Points (P, k) and weights (P,) of the product rule on a box."""
    if not bounds:
        return np.zeros((1, 0)), np.ones(1)
    rules = [gauss_legendre(nodes, a, b) for a, b in bounds]
    grids = np.meshgrid(*[x for x, _ in rules], indexing="ij")
    weight_grids = np.meshgrid(*[w for _, w in rules], indexing="ij")
    points = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.prod(np.stack([w.ravel() for w in weight_grids], axis=1), axis=1)
    return points, weights


def pyramid_rule(dimension: int, lower: float, upper: float, nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """Product rule on the cube [lower, upper]^k split into the k pyramids t~_j = max.

    In pyramid j, rho = t~_j and u_i = t~_i / rho in [lower / rho, 1], so a
    singularity at the corner t~ = 0 only enters through rho. rho is sampled
    in log rho when lower > 0. Returns points (P, k) and weights (P,).
    """
    if dimension == 0:
        return np.zeros((1, 0)), np.ones(1)
    if lower > 0:
        log_rho, log_weights = gauss_legendre(nodes, np.log(lower), np.log(upper))
        rho = np.exp(log_rho)
        rho_weights = log_weights * rho
    else:
        rho, rho_weights = gauss_legendre(nodes, 0.0, upper)
    point_blocks, weight_blocks = [], []
    for r, w in zip(rho, rho_weights):
        u, u_weights = tensor_gauss_legendre([(lower / r, 1.0)] * (dimension - 1), nodes)
        for j in range(dimension):
            points = np.empty((len(u_weights), dimension))
            points[:, j] = r
            points[:, [i for i in range(dimension) if i != j]] = r * u
            point_blocks.append(points)
            weight_blocks.append(w * r ** (dimension - 1) * u_weights)
    return np.concatenate(point_blocks), np.concatenate(weight_blocks)


def sphere_patch_area(k: int) -> float:
    """Area of the positive orthant of the unit sphere S^{k-1}."""
    if k == 1:
        return 1.0
    return 2.0 * np.pi ** (k / 2.0) / special.gamma(k / 2.0) / 2.0 ** k


def sphere_patch_quadrature(k: int, nodes: int = 12, mc_samples: int = 0,
                            seed: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """Rule on {xi in R^k : |xi| = 1, xi > 0}: points (P, k), weights (P,).

    Tensor Gauss-Legendre in hyperspherical angles on [0, pi/2]^{k-1}, or
    seeded Monte Carlo from normalized |Gaussian| samples.
    """
    if k < 1:
        raise FormError(f"sphere patch needs k >= 1, got {k}")
    if k == 1:
        return np.ones((1, 1)), np.ones(1)
    if mc_samples:
        rng = np.random.default_rng(seed)
        samples = np.abs(rng.normal(size=(mc_samples, k)))
        points = samples / np.linalg.norm(samples, axis=1)[:, None]
        return points, np.full(mc_samples, sphere_patch_area(k) / mc_samples)
    angles, weights = tensor_gauss_legendre([(0.0, np.pi / 2.0)] * (k - 1), nodes)
    points = np.ones((len(weights), k))
    sines = np.ones(len(weights))
    jacobian = np.ones(len(weights))
    for j in range(k - 1):
        points[:, j] = sines * np.cos(angles[:, j])
        jacobian *= np.sin(angles[:, j]) ** (k - 2 - j)
        sines = sines * np.sin(angles[:, j])
    points[:, k - 1] = sines
    return points, weights * jacobian


def richardson_limit(step_ratio: float, values: Sequence, first_order: int = 1):
    """Limit h -> 0 of values sampled at h, h/r, h/r^2, ... (coarse to fine).

    Repeatedly eliminates the leading powers h^{first_order}, h^{first_order+1}, ...
    Works elementwise on arrays. Returns (limit, error estimate), the error
    being the change between the last two diagonal entries.
    """
    levels = [np.asarray(v, dtype=complex) for v in values]
    if not levels:
        raise ValueError("richardson_limit needs at least one value")
    if len(levels) == 1:
        return levels[0], np.full(levels[0].shape, np.inf)
    diagonal = [levels[-1]]
    last_level = levels
    for m in range(len(levels) - 1):
        mult = step_ratio ** (first_order + m)
        factor = 1.0 / (mult - 1.0)
        this_level = [factor * (mult * last_level[i + 1] - last_level[i]) for i in range(len(last_level) - 1)]
        diagonal.append(this_level[-1])
        last_level = this_level
    return diagonal[-1], np.abs(diagonal[-1] - diagonal[-2])


@dataclass(frozen=True)
class BoxDomain:
    """Product of intervals over the given edges (t~ coordinates), standard orientation."""

    edges: Tuple[int, ...]
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    @property
    def dimension(self) -> int:
        return len(self.edges)

    @classmethod
    def cube(cls, edges: Sequence[int], lower: float, upper: float) -> "BoxDomain":
        edges = tuple(edges)
        return cls(edges, (lower,) * len(edges), (upper,) * len(edges))


@dataclass(frozen=True)
class SphereDomain:
    """Positive orthant sphere |t~_S| = radius with the outward (away from 0) orientation."""

    edges: Tuple[int, ...]
    radius: float = 1.0

    @property
    def dimension(self) -> int:
        return len(self.edges) - 1


@dataclass(frozen=True)
class FaceDomain:
    """The face t~_edge = value of a box, oriented by the normal sign * e_edge."""

    edge: int
    value: float
    normal_sign: int
    rest: BoxDomain

    @property
    def dimension(self) -> int:
        return self.rest.dimension


def flux_components(coefficients: Dict[Tuple[int, ...], complex], edges: Sequence[int]) -> Dict[int, complex]:
    """a_e with omega = sum_e a_e i_{d/dt_e} vol: a_e = (-1)^{pos(e)} c_{edges minus e}."""
    edges = tuple(sorted(edges))
    flux = {}
    for pos, e in enumerate(edges):
        rest = tuple(x for x in edges if x != e)
        flux[e] = (-1) ** pos * coefficients.get(rest, 0.0)
    return flux


def to_box_coordinates(form: Form, flag: Flag) -> Form:
    """Pull a form in chart coordinates (rho, xi, free t~) back to t~ coordinates."""
    tt = {e: coordinate("tt", e) for e in range(flag.edge_count)}
    norms = [sp.sqrt(sum(tt[e] ** 2 for e in sorted(flag.level_set(k)))) for k in range(1, flag.depth + 1)]
    substitution = {s: s for s in tt.values()}
    for k in range(flag.depth):
        substitution[coordinate("rho", k + 1)] = norms[k] if k == 0 else norms[k] / norms[k - 1]
    for e in flag.level_set(1):
        substitution[coordinate("xi", e)] = tt[e] / norms[flag.level_of(e) - 1]
    return pullback(form, substitution)


def _coefficient_functions(form: Form, edges: Sequence[int]):
    symbols = [coordinate("tt", e) for e in edges]
    stray = set(form.free_symbols()) - set(symbols)
    if stray:
        raise FormError(f"form depends on {sorted(s.name for s in stray)} outside the domain")
    functions = {}
    for key, coeff in form.terms.items():
        if any(g.kind != "tt" for g in key):
            raise FormError(f"form term {key} is not in t~ generators")
        fn = sp.lambdify(symbols, coeff, modules="numpy")
        functions[tuple(g.index[0] for g in key)] = fn
    return functions


def _evaluate(functions, points: np.ndarray) -> Dict[Tuple[int, ...], np.ndarray]:
    columns = [points[:, i] for i in range(points.shape[1])]
    return {key: np.broadcast_to(np.asarray(fn(*columns), dtype=complex), (points.shape[0],))
            for key, fn in functions.items()}


def _integrate_once(form: Form, domain, nodes: int, mc_samples: int, seed: int) -> Tuple[complex, int]:
    if isinstance(domain, BoxDomain):
        edges = domain.edges
        functions = _coefficient_functions(form, edges)
        points, weights = tensor_gauss_legendre(list(zip(domain.lower, domain.upper)), nodes)
        values = _evaluate(functions, points)
        top = tuple(sorted(edges))
        sign = 1 if list(edges) == list(top) else _permutation_sign(edges, top)
        integrand = values.get(top, np.zeros(len(weights)))
        return sign * complex(np.sum(weights * integrand)), len(weights)
    if isinstance(domain, SphereDomain):
        edges = tuple(sorted(domain.edges))
        functions = _coefficient_functions(form, edges)
        xi, weights = sphere_patch_quadrature(len(edges), nodes, mc_samples, seed)
        values = _evaluate(functions, domain.radius * xi)
        flux = flux_components(values, edges)
        integrand = sum(xi[:, i] * flux[e] for i, e in enumerate(edges))
        scale = domain.radius ** (len(edges) - 1)
        return scale * complex(np.sum(weights * integrand)), len(weights)
    if isinstance(domain, FaceDomain):
        edges = tuple(sorted(domain.rest.edges + (domain.edge,)))
        functions = _coefficient_functions(form, edges)
        rest_points, weights = tensor_gauss_legendre(list(zip(domain.rest.lower, domain.rest.upper)), nodes)
        points = np.zeros((len(weights), len(edges)))
        for i, e in enumerate(edges):
            if e == domain.edge:
                points[:, i] = domain.value
            else:
                points[:, i] = rest_points[:, domain.rest.edges.index(e)]
        flux = flux_components(_evaluate(functions, points), edges)
        return domain.normal_sign * complex(np.sum(weights * flux[domain.edge])), len(weights)
    raise FormError(f"unknown integration domain {type(domain).__name__}")


def _permutation_sign(order: Sequence[int], target: Sequence[int]) -> int:
    position = {e: i for i, e in enumerate(target)}
    perm = [position[e] for e in order]
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def integrate_form(form: Form, domain, quadrature: Optional[QuadratureSpec] = None,
                   flag: Optional[Flag] = None) -> IntegralResult:
    """Integrate a form of matching degree over a box, face or sphere patch.

    Forms written in chart coordinates need the flag to be pulled back first.
    """
    quadrature = quadrature or QuadratureSpec()
    if any(g.kind in ("rho", "xi") for g in form.generators()) or any(
            s.name.startswith(("rho_", "xi_")) for s in form.free_symbols()):
        if flag is None:
            raise FormError("a form in chart coordinates needs its flag")
        form = to_box_coordinates(form, flag)
    degrees = form.degrees()
    if degrees and degrees != {domain.dimension}:
        raise FormError(f"form degrees {sorted(degrees)} do not match domain dimension {domain.dimension}")

    start = time.time()
    value, used = _integrate_once(form, domain, quadrature.nodes_per_axis, quadrature.mc_samples, quadrature.seed)
    coarse = quadrature.halved()
    if quadrature.mc_samples:
        coarse_value, _ = _integrate_once(form, domain, coarse.nodes_per_axis, coarse.mc_samples,
                                          quadrature.seed + 1)
    else:
        coarse_value, _ = _integrate_once(form, domain, coarse.nodes_per_axis, 0, quadrature.seed)
    duration = time.time() - start
    error = abs(value - coarse_value)
    logger.quadrature("integrate_form", used, value, error, duration)
    return IntegralResult(value, error, used, quadrature.seed, duration)

"""Numeric position integration of the graph integrand at a Schwinger node.

Every propagator contributes the 1-forms du^e_k and dv^e_k. Their position
parts are constant in positions (rho^e_i / 2t_e and rho^e_i / 2 sqrt t_e) and
their dt_e parts are linear in positions. The wedge of all rows against the
generators of Phi is a determinant; expanding it along the dt columns leaves
constant minors times products of linear factors, whose Gaussian moments
are hafnians of pair covariances.
"""
import time
from dataclasses import dataclass
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from .problem import GraphIntegralProblem, integrated_vertices

try:
    from ..forms.exterior import Form, Generator, coordinate, generator_of
    from ..graphs.combinatorics import incidence_matrix
    from ..kernels.heat import spacetime_orientation_factor
    from ..utils.errors import GaussianError, NonGaussianError
    from ..utils.logger import logger
    from ..wick.gaussian import LinearFactor, factors_moment, gaussian_normalization
except ImportError:
    from forms.exterior import Form, Generator, coordinate, generator_of
    from graphs.combinatorics import incidence_matrix
    from kernels.heat import spacetime_orientation_factor
    from utils.errors import GaussianError, NonGaussianError
    from utils.logger import logger
    from wick.gaussian import LinearFactor, factors_moment, gaussian_normalization


def integral_sign(sig, edge_count: int) -> int:
    """(-1)^{(d+d'-1) m (m-1)/2 + m}"""
    m = edge_count
    return -1 if ((sig.total - 1) * m * (m - 1) // 2 + m) % 2 else 1


def _parity(items: Sequence) -> int:
    sign = 1
    items = list(items)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class _Expansion:
    """One (D, S) pair of the Laplace expansion along the dt columns."""

    edges: Tuple[int, ...]          # D
    sign: int                       # merge sign times Laplace sign
    dt_rows: Tuple[int, ...]        # S, one row per edge of D
    minor_rows: Tuple[int, ...]     # rows outside S


@dataclass(frozen=True)
class _SourceTerm:
    minor_columns: Tuple[int, ...]
    expansions: Tuple[_Expansion, ...]
    # (coefficient, z slots, zbar slots, x slots) per monomial of the polynomial
    monomials: Tuple[Tuple[complex, Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]], ...]


@dataclass(frozen=True)
class CompiledIntegrand:
    """Picklable numeric form of a GraphIntegralProblem."""

    d: int
    d_prime: int
    edge_count: int
    incidence: np.ndarray           # (m, |V|), integrated vertices only
    decorations: np.ndarray         # (m, d)
    complex_shift: np.ndarray       # 1/sigma_i^2 per integrated vertex
    real_shift: np.ndarray          # 2/sigma_i^2 per integrated vertex
    terms: Tuple[_SourceTerm, ...]
    prefactor: complex

    @property
    def vertex_count(self) -> int:
        return self.incidence.shape[1]

    @property
    def row_count(self) -> int:
        return self.edge_count * (self.d + self.d_prime)

    def matrices(self, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        laplacian = self.incidence.T @ (self.incidence / t[:, None])
        A = np.kron(0.5 * laplacian, np.eye(self.d)) + np.diag(np.repeat(self.complex_shift, self.d))
        B = np.kron(0.5 * laplacian, np.eye(self.d_prime)) + np.diag(np.repeat(self.real_shift, self.d_prime))
        return A, B

    def _row_data(self, t: np.ndarray):
        """Position-column matrix, dt factors and decoration factors of every row."""
        nv, d, dp = self.vertex_count, self.d, self.d_prime
        nc, nr = nv * d, nv * dp
        rows = np.zeros((self.row_count, nc + nr))
        dt_factors: List[LinearFactor] = []
        decoration_factors: List[LinearFactor] = []
        zeros_c, zeros_r = np.zeros(nc), np.zeros(nr)
        for e in range(self.edge_count):
            rho = self.incidence[e]
            base = e * (d + dp)
            for k in range(d):
                slots = np.arange(nv) * d + k
                rows[base + k, slots] = rho / (2 * t[e])
                beta = zeros_c.copy()
                beta[slots] = -rho / (2 * t[e] ** 2)
                dt_factors.append(LinearFactor(zeros_c, beta, zeros_r))
                u = zeros_c.copy()
                u[slots] = rho / (2 * t[e])
                decoration_factors += [LinearFactor(zeros_c, u, zeros_r)] * int(self.decorations[e, k])
            for k in range(dp):
                slots = np.arange(nv) * dp + k
                rows[base + d + k, nc + slots] = rho / (2 * np.sqrt(t[e]))
                gamma = zeros_r.copy()
                gamma[slots] = -rho / (4 * t[e] ** 1.5)
                dt_factors.append(LinearFactor(zeros_c, zeros_c, gamma))
        return rows, dt_factors, decoration_factors

    def _monomial_factors(self, z_slots, zbar_slots, x_slots) -> List[LinearFactor]:
        nc, nr = self.vertex_count * self.d, self.vertex_count * self.d_prime
        factors = []
        for kind, slots in ((0, z_slots), (1, zbar_slots), (2, x_slots)):
            for slot in slots:
                parts = [np.zeros(nc), np.zeros(nc), np.zeros(nr)]
                parts[kind][slot] = 1.0
                factors.append(LinearFactor(*parts))
        return factors

    def coefficients(self, tt: Sequence[float], with_scale: bool = False):
        """Coefficients of dt~_D after integrating out positions, keyed by D.

        With with_scale, also returns the same sums taken over absolute values.
        """
        tt = np.asarray(tt, dtype=float)
        t = tt ** 2
        A, B = self.matrices(t)
        a_inv = np.linalg.inv(A) if A.size else A
        b_inv = np.linalg.inv(B) if B.size else B
        normalization = gaussian_normalization(A, B)
        rows, dt_factors, decoration_factors = self._row_data(t)

        values: Dict[Tuple[int, ...], complex] = {}
        scales: Dict[Tuple[int, ...], float] = {}
        for term in self.terms:
            columns = list(term.minor_columns)
            monomial_factors = [(c, self._monomial_factors(*slots)) for c, *slots in term.monomials]
            for expansion in term.expansions:
                if columns:
                    minor = float(np.linalg.det(rows[np.ix_(expansion.minor_rows, columns)]))
                else:
                    minor = 1.0
                if minor == 0.0:
                    continue
                fixed = [dt_factors[r] for r in expansion.dt_rows] + decoration_factors
                jacobian = float(np.prod(2 * tt[list(expansion.edges)]))
                for coeff, extra in monomial_factors:
                    moment = _balanced_moment(fixed + extra, a_inv, b_inv)
                    if moment == 0:
                        continue
                    contribution = expansion.sign * minor * coeff * moment * jacobian
                    values[expansion.edges] = values.get(expansion.edges, 0j) + contribution
                    scales[expansion.edges] = scales.get(expansion.edges, 0.0) + abs(contribution)
        factor = self.prefactor * normalization
        values = {k: factor * v for k, v in values.items()}
        if with_scale:
            return values, {k: abs(factor) * v for k, v in scales.items()}
        return values


def _balanced_moment(factors: List[LinearFactor], a_inv: np.ndarray, b_inv: np.ndarray) -> complex:
    holomorphic = sum(1 for f in factors if np.any(f.alpha))
    antiholomorphic = sum(1 for f in factors if np.any(f.beta))
    real = sum(1 for f in factors if np.any(f.gamma))
    if holomorphic != antiholomorphic or real % 2:
        return 0j
    return factors_moment(factors, a_inv, b_inv)


def _position_gens(sig, vertices) -> Tuple[List[Generator], List[Generator]]:
    holomorphic = [Generator.of("z", v, k) for v in vertices for k in range(1, sig.d + 1)]
    columns = ([Generator.of("zbar", v, k) for v in vertices for k in range(1, sig.d + 1)]
               + [Generator.of("x", v, k) for v in vertices for k in range(1, sig.d_prime + 1)])
    return holomorphic, columns


def _slot(sig, vertices, symbol: sp.Symbol) -> Tuple[int, int]:
    gen = generator_of(symbol)
    vertex, k = gen.index
    position = vertices.index(vertex)
    if gen.kind == "x":
        return 2, position * sig.d_prime + (k - 1)
    return (0 if gen.kind == "z" else 1), position * sig.d + (k - 1)


def _compile_term(problem: GraphIntegralProblem, key: Tuple[Generator, ...], coeff: sp.Expr,
                  vertices: List[int]) -> Optional[_SourceTerm]:
    sig, m = problem.sig, problem.edge_count
    holomorphic, columns = _position_gens(sig, vertices)
    if not set(holomorphic) <= set(key):
        return None
    minor_columns = tuple(i for i, g in enumerate(columns) if g not in key)
    width = sig.total
    dt_count = m * width - len(minor_columns)
    if not 0 <= dt_count <= m:
        return None

    expansions = []
    full_positions = sorted(holomorphic + columns)
    for edges in combinations(range(m), dt_count):
        dt_gens = [Generator.of("tt", e) for e in edges]
        # rows produce (minor columns, dt columns) in this order, then Phi's generators follow
        produced = [columns[i] for i in minor_columns] + dt_gens + list(key)
        target = full_positions + dt_gens
        merge = _parity([target.index(g) for g in produced])
        offset = len(minor_columns)
        column_sum = dt_count * offset + dt_count * (dt_count + 1) // 2
        for choice in product(range(width), repeat=dt_count):
            dt_rows = tuple(e * width + r for e, r in zip(edges, choice))
            minor_rows = tuple(r for r in range(m * width) if r not in dt_rows)
            laplace = -1 if (sum(r + 1 for r in dt_rows) + column_sum) % 2 else 1
            expansions.append(_Expansion(tuple(edges), merge * laplace, dt_rows, minor_rows))

    variables = sorted(coeff.free_symbols, key=lambda s: s.name)
    monomials = []
    if variables:
        poly = sp.Poly(sp.expand(coeff), *variables)
        items = poly.terms()
    else:
        items = [((), coeff)]
    for powers, c in items:
        slots = ([], [], [])
        for symbol, power in zip(variables, powers):
            kind, slot = _slot(sig, vertices, symbol)
            slots[kind].extend([slot] * power)
        monomials.append((complex(c), tuple(slots[0]), tuple(slots[1]), tuple(slots[2])))
    return _SourceTerm(minor_columns, tuple(expansions), tuple(monomials))


def compile_problem(problem: GraphIntegralProblem) -> CompiledIntegrand:
    """Freeze a Gaussian-source problem into numpy data for reduce_positions."""
    if problem.source.mode == "bump":
        raise NonGaussianError("bump sources have no Gaussian form; use brute_force_reduce")
    sig, source = problem.sig, problem.source
    vertices = list(problem.vertices)
    incidence = incidence_matrix(problem.graph).astype(float)[:, [v - 1 for v in vertices]]
    if source.mode == "absolute":
        complex_shift = np.array([1.0 / source.width(v) ** 2 for v in vertices])
        real_shift = 2.0 * complex_shift
    else:
        complex_shift = real_shift = np.zeros(len(vertices))
    terms = []
    for key, coeff in source.polyform.terms.items():
        term = _compile_term(problem, key, coeff, vertices)
        if term is not None:
            terms.append(term)
    m = problem.edge_count
    prefactor = (integral_sign(sig, m) * np.pi ** (-sig.heat_exponent * m)
                 * spacetime_orientation_factor(len(vertices) * sig.d))
    return CompiledIntegrand(sig.d, sig.d_prime, m, incidence,
                             np.array(problem.decorations(), dtype=int).reshape(m, sig.d),
                             complex_shift, real_shift, tuple(terms), complex(prefactor))


def coefficients_to_form(values: Dict[Tuple[int, ...], complex]) -> Form:
    return Form({tuple(Generator.of("tt", e) for e in key): sp.Float(v.real) + sp.I * sp.Float(v.imag)
                 for key, v in values.items() if v != 0})


def reduce_positions(problem: GraphIntegralProblem, tt: Sequence[float]) -> Form:
    """Integrate out every position at the Schwinger node t~ (t = t~^2)."""
    tt = np.asarray(tt, dtype=float)
    if tt.shape != (problem.edge_count,) or np.any(tt <= 0):
        raise GaussianError(f"need {problem.edge_count} positive Schwinger coordinates, got {tt}")
    compiled = compile_problem(problem)
    return coefficients_to_form(compiled.coefficients(tt))


def evaluate_node(task) -> Dict[Tuple[int, ...], complex]:
    """Worker entry point: (compiled integrand, t~) -> coefficients."""
    compiled, tt = task
    return compiled.coefficients(tt)


def evaluate_node_with_scale(task):
    compiled, tt = task
    return compiled.coefficients(tt, with_scale=True)


# brute-force oracle


def _bump(points: np.ndarray, radius: float) -> np.ndarray:
    r2 = np.sum(points ** 2, axis=1) / radius ** 2
    out = np.zeros(len(points))
    inside = r2 < 1
    out[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    return out


def brute_force_reduce(problem: GraphIntegralProblem, tt: Sequence[float], nodes: int = 20,
                       max_dimension: int = 4) -> Dict[Tuple[int, ...], complex]:
    """Position quadrature of the symbolic integrand at t~ (small position dimension only).

    Gaussian sources use Gauss-Hermite after whitening by the integrand's own
    quadratic form; bump sources use Gauss-Legendre on the support box.
    """
    from scipy import special

    from .integrand import build_integrand

    start = time.time()
    sig = problem.sig
    vertices = list(problem.vertices)
    dimension = len(vertices) * sig.real_dimension
    if dimension > max_dimension:
        raise GaussianError(f"brute-force quadrature over {dimension} position dimensions is not supported")
    tt = np.asarray(tt, dtype=float)
    integrand = build_integrand(problem)
    values_at = {coordinate("tt", e): float(v) for e, v in enumerate(tt)}
    holomorphic, columns = _position_gens(sig, vertices)
    top = set(holomorphic + columns)

    # Euclidean coordinates (Re z, Im z per complex slot, then x)
    z_syms = [coordinate("z", v, k) for v in vertices for k in range(1, sig.d + 1)]
    zb_syms = [coordinate("zbar", v, k) for v in vertices for k in range(1, sig.d + 1)]
    x_syms = [coordinate("x", v, k) for v in vertices for k in range(1, sig.d_prime + 1)]
    a, b = sp.symbols("a_0:%d" % len(z_syms), real=True), sp.symbols("b_0:%d" % len(z_syms), real=True)
    euclid = list(a) + list(b) + x_syms
    substitution = {**{z: a[i] + sp.I * b[i] for i, z in enumerate(z_syms)},
                    **{zb: a[i] - sp.I * b[i] for i, zb in enumerate(zb_syms)}}

    if problem.source.mode == "bump":
        radius = problem.source.bump_radius
        points, weights = _tensor_rule(special.roots_legendre(nodes), dimension, radius)
        weights = weights * _bump(points, radius)
        shift = None
    else:
        compiled = compile_problem(problem.with_source(problem.source.__class__(Form.scalar(1), problem.source.sigma,
                                                                                problem.source.widths,
                                                                                problem.source.mode)))
        A, B = compiled.matrices(tt ** 2)
        precision = _euclidean_precision(A, B, sig, len(vertices))
        chol = np.linalg.cholesky(precision)
        transform = np.sqrt(2.0) * np.linalg.inv(chol).T
        y, w = _tensor_rule(special.roots_hermite(nodes), dimension, 1.0)
        points = y @ transform.T
        weights = w * abs(np.linalg.det(transform))
        shift = np.einsum("ij,jk,ik->i", points, precision, points) / 2.0

    columns_np = [points[:, i] for i in range(dimension)]
    result: Dict[Tuple[int, ...], complex] = {}
    for key, coeff in integrand.terms.items():
        positions = [g for g in key if g.is_position]
        if set(positions) != top:
            continue
        rest = tuple(g.index[0] for g in key if not g.is_position)
        expr = coeff.xreplace(values_at).xreplace(substitution)
        fn = sp.lambdify(euclid, expr, modules="numpy")
        samples = np.broadcast_to(np.asarray(fn(*columns_np), dtype=complex), (len(weights),))
        if shift is not None:
            samples = samples * np.exp(shift)
        value = complex(np.sum(weights * samples)) * spacetime_orientation_factor(len(z_syms))
        result[rest] = result.get(rest, 0j) + value
    logger.quadrature("brute_force_reduce", len(weights), None, None, time.time() - start)
    return result


def _tensor_rule(rule, dimension: int, scale: float):
    x, w = rule
    grids = np.meshgrid(*([x * scale] * dimension), indexing="ij")
    weight_grids = np.meshgrid(*([w * scale] * dimension), indexing="ij")
    points = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.prod(np.stack([g.ravel() for g in weight_grids], axis=1), axis=1)
    return points, weights


def _euclidean_precision(A: np.ndarray, B: np.ndarray, sig, vertex_count: int) -> np.ndarray:
    """P with w A wbar + 1/2 q B q = 1/2 p^T P p in p = (Re w, Im w, q); A real symmetric here."""
    nc = vertex_count * sig.d
    size = 2 * nc + B.shape[0]
    precision = np.zeros((size, size))
    precision[:nc, :nc] = 2 * A.real
    precision[nc:2 * nc, nc:2 * nc] = 2 * A.real
    precision[2 * nc:, 2 * nc:] = B
    return precision

"""Graph integral problems and the test forms Phi they pair with."""
import hashlib
from dataclasses import dataclass, replace
from typing import Iterable, List, Sequence, Tuple

import sympy as sp

try:
    from ..forms.exterior import Form, Generator, coordinate, exterior_derivative, generator_of, pullback, wedge
    from ..graphs.decorated_graph import DecoratedGraph, Signature
    from ..kernels.heat import position_symbols
    from ..schwinger.quadrature import IntegralResult
    from ..utils.errors import FormError, GraphError
    from ..utils.logger import logger
except ImportError:
    from forms.exterior import Form, Generator, coordinate, exterior_derivative, generator_of, pullback, wedge
    from graphs.decorated_graph import DecoratedGraph, Signature
    from kernels.heat import position_symbols
    from schwinger.quadrature import IntegralResult
    from utils.errors import FormError, GraphError
    from utils.logger import logger

SOURCE_MODES = ("absolute", "relative", "bump")
MAX_SOURCE_DEGREE = 8


def _position_symbols_of(form: Form) -> List[sp.Symbol]:
    symbols = []
    for s in form.free_symbols():
        gen = generator_of(s)
        if gen is None or not gen.is_position:
            raise FormError(f"source coefficient depends on {s}, which is not a position coordinate")
        symbols.append(s)
    return sorted(symbols, key=lambda s: s.name)


@dataclass(frozen=True, eq=False)
class TestSource:
    """Phi = polyform * exp(E).

    absolute: E = -sum_i (|z^i|^2 + |x^i|^2) / sigma_i^2 over every vertex.
    relative: E = 0 and the base vertex sits at the origin; the propagators
    provide the decay.
    bump: compact support exp(-1/(1 - |p|^2/R^2)) inside |p| < R; only the
    brute-force reducer handles it.
    """

    polyform: Form
    sigma: float = 1.0
    widths: Tuple[float, ...] = ()
    mode: str = "absolute"
    bump_radius: float = 3.0

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if self.mode not in SOURCE_MODES:
            raise FormError(f"unknown source mode '{self.mode}', expected one of {SOURCE_MODES}")
        object.__setattr__(self, "widths", tuple(float(w) for w in self.widths))
        if self.sigma <= 0 or any(w <= 0 for w in self.widths):
            raise FormError("gaussian widths must be positive")
        for key in self.polyform.terms:
            if any(not g.is_position for g in key):
                raise FormError(f"source generator {key} is not a position generator")
        variables = _position_symbols_of(self.polyform)
        for coeff in self.polyform.terms.values():
            if not variables:
                continue
            try:
                degree = sp.Poly(coeff, *variables).total_degree()
            except sp.PolynomialError as e:
                raise FormError(f"source coefficient {coeff} is not polynomial") from e
            if degree > MAX_SOURCE_DEGREE:
                raise FormError(f"source polynomial degree {degree} exceeds {MAX_SOURCE_DEGREE}")

    # construction

    @classmethod
    def gaussian(cls, generators: Sequence[Generator], polynomial=1, sigma: float = 1.0,
                 mode: str = "absolute", widths: Sequence[float] = ()) -> "TestSource":
        return cls(Form.monomial(list(generators), polynomial), sigma, tuple(widths), mode)

    @classmethod
    def default(cls, sig: Signature, graph: DecoratedGraph, mode: str = "absolute", codegree: int = 0,
                polynomial=1, sigma: float = 1.0) -> "TestSource":
        """Gaussian source whose reduced integrand has Schwinger degree |E| - codegree.

        Carries every dz of the integrated vertices, then dzbar/dx generators
        taken from the base vertex downwards until the degree count matches.
        """
        vertices = integrated_vertices(graph, mode)
        m = graph.edge_count
        wanted = m - codegree - m * sig.total + len(vertices) * sig.total
        pool: List[Generator] = []
        for v in sorted(vertices, reverse=True):
            pool += [Generator.of("zbar", v, k) for k in range(1, sig.d + 1)]
            pool += [Generator.of("x", v, k) for k in range(1, sig.d_prime + 1)]
        extra = min(max(wanted, 0), len(pool))
        if extra != wanted:
            logger.warning(f"default source cannot reach Schwinger degree {m - codegree}; "
                           f"using {extra} extra generators instead of {wanted}")
        gens = [Generator.of("z", v, k) for v in vertices for k in range(1, sig.d + 1)] + pool[:extra]
        return cls.gaussian(gens, polynomial, sigma, mode)

    @classmethod
    def balanced(cls, sig: Signature, graph: DecoratedGraph, mode: str = "absolute", codegree: int = 0,
                 sigma: float = 1.0) -> "TestSource":
        """default() with polynomial prod_v (1 + z_{v,1}) (x_{v,1} when d = 0).

        The dt rows of the reduced integrand contribute antiholomorphic or x
        factors; a constant polynomial leaves those moments unbalanced and the
        integral vanishes identically.
        """
        kind = "z" if sig.d else "x"
        polynomial = sp.Integer(1)
        for v in integrated_vertices(graph, mode)[:MAX_SOURCE_DEGREE]:
            polynomial *= 1 + coordinate(kind, v, 1)
        return cls.default(sig, graph, mode, codegree, sp.expand(polynomial), sigma)

    # geometry

    def width(self, vertex: int) -> float:
        if self.widths:
            return self.widths[vertex - 1]
        return self.sigma

    def validate(self, sig: Signature, vertex_count: int):
        if self.widths and len(self.widths) != vertex_count:
            raise FormError(f"source has {len(self.widths)} widths for {vertex_count} vertices")
        symbols = set(self.polyform.free_symbols()) | {g.symbol for g in self.polyform.generators()}
        for s in symbols:
            gen = generator_of(s)
            vertex, k = gen.index
            limit = sig.d if gen.kind in ("z", "zbar") else sig.d_prime
            if not 1 <= vertex <= vertex_count or not 1 <= k <= limit:
                raise FormError(f"source coordinate {s} does not exist for {vertex_count} vertices at {sig}")
            if self.mode == "relative" and vertex == vertex_count:
                raise FormError(f"relative sources cannot involve the base vertex ({s})")

    def exponent(self, sig: Signature, vertices: Iterable[int]) -> sp.Expr:
        if self.mode != "absolute":
            return sp.Integer(0)
        total = sp.Integer(0)
        for v in vertices:
            z, zbar, x = position_symbols(sig, v)
            inv = sp.Float(1.0 / self.width(v) ** 2)
            total -= inv * (sum(a * b for a, b in zip(z, zbar)) + sum(s ** 2 for s in x))
        return total

    def full_form(self, sig: Signature, vertices: Iterable[int]) -> Form:
        """polyform * exp(E); bump sources keep only the polynomial part."""
        factor = sp.exp(self.exponent(sig, vertices))
        return self.polyform.map_coefficients(lambda c: c * factor)

    def polynomial_degree(self) -> int:
        variables = _position_symbols_of(self.polyform)
        if not variables:
            return 0
        return max(sp.Poly(c, *variables).total_degree() for c in self.polyform.terms.values())

    # operations

    def differential(self, sig: Signature, vertices: Iterable[int]) -> "TestSource":
        """(dbar + d) Phi = exp(E) (d omega + dE ^ omega)"""
        vertices = list(vertices)
        kinds = ("zbar", "x")
        d_omega = exterior_derivative(self.polyform, kinds)
        d_exponent = exterior_derivative(Form.scalar(self.exponent(sig, vertices)), kinds)
        return replace(self, polyform=(d_omega + wedge(d_exponent, self.polyform)).expand())

    def reflected(self) -> "TestSource":
        """Pullback along x^i_1 -> -x^i_1 for every vertex."""
        symbols = set(self.polyform.free_symbols()) | {g.symbol for g in self.polyform.generators()}
        substitution = {s: (-s if generator_of(s).kind == "x" and generator_of(s).index[1] == 1 else s)
                        for s in symbols}
        return replace(self, polyform=pullback(self.polyform, substitution).expand())

    def scaled_polynomial(self, factor) -> "TestSource":
        return replace(self, polyform=self.polyform.map_coefficients(lambda c: sp.expand(c * factor)))

    def __add__(self, other: "TestSource") -> "TestSource":
        if (self.mode, self.sigma, self.widths) != (other.mode, other.sigma, other.widths):
            raise FormError("only sources with the same Gaussian and mode can be added")
        return replace(self, polyform=self.polyform + other.polyform)

    def describe(self) -> str:
        terms = ", ".join(f"{list(k)}: {sp.sstr(v)}" for k, v in sorted(self.polyform.terms.items()))
        return f"{self.mode}(sigma={self.sigma}, widths={self.widths}, R={self.bump_radius}) {{{terms}}}"


def integrated_vertices(graph: DecoratedGraph, mode: str) -> Tuple[int, ...]:
    """Vertices whose positions are integrated; relative mode pins the base vertex."""
    if mode == "relative":
        return tuple(range(1, graph.vertex_count))
    return tuple(range(1, graph.vertex_count + 1))


@dataclass(frozen=True, eq=False)
class GraphIntegralProblem:
    graph: DecoratedGraph
    sig: Signature
    source: TestSource
    L: float = 1.0
    eps: float = 0.0
    allow_disconnected: bool = False

    def __post_init__(self):
        self.graph.require_no_self_loops()
        self.graph.check_decorations(self.sig)
        if self.graph.edge_count == 0:
            raise GraphError("graph integrals need at least one edge")
        if self.L <= 0:
            raise GraphError(f"L must be positive, got {self.L}")
        if not 0 <= self.eps <= self.L:
            raise GraphError(f"eps must lie in [0, L], got {self.eps}")
        connected = self.graph.is_connected()
        if not connected and (self.source.mode == "relative" or not self.allow_disconnected):
            raise GraphError("graph is disconnected; evaluate it through components_factorization")
        self.source.validate(self.sig, self.graph.vertex_count)

    @property
    def edge_count(self) -> int:
        return self.graph.edge_count

    @property
    def vertices(self) -> Tuple[int, ...]:
        return integrated_vertices(self.graph, self.source.mode)

    def decorations(self) -> List[Tuple[int, ...]]:
        return [self.graph.decoration(e, self.sig.d) for e in range(self.edge_count)]

    def with_source(self, source: TestSource) -> "GraphIntegralProblem":
        return replace(self, source=source)

    def with_eps(self, eps: float) -> "GraphIntegralProblem":
        return replace(self, eps=eps)

    def describe(self) -> str:
        edges = ";".join(f"{e.tail}->{e.head}{list(e.decoration)}" for e in self.graph.edges)
        return (f"V={self.graph.vertex_count} E=[{edges}] sig={self.sig} L={self.L!r} eps={self.eps!r} "
                f"source={self.source.describe()}")

    def problem_hash(self) -> str:
        return hashlib.sha256(self.describe().encode()).hexdigest()[:16]


__all__ = ["GraphIntegralProblem", "IntegralResult", "TestSource", "integrated_vertices", "SOURCE_MODES"]

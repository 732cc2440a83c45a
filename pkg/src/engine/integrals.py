"""Regularized graph integrals W_eps^L, W_0^L and the eps -> 0 sequence."""
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .problem import GraphIntegralProblem, TestSource
from .reducer import CompiledIntegrand, compile_problem, evaluate_node_with_scale

try:
    from ..forms.exterior import Form, coordinate, generator_of, pullback, wedge
    from ..graphs.decorated_graph import DecoratedGraph, Edge
    from ..schwinger.quadrature import IntegralResult, pyramid_rule, richardson_limit
    from ..utils.config import QuadratureSpec
    from ..utils.errors import GraphError
    from ..utils.logger import logger
    from ..utils.parallel import parallel_map
except ImportError:
    from forms.exterior import Form, coordinate, generator_of, pullback, wedge
    from graphs.decorated_graph import DecoratedGraph, Edge
    from schwinger.quadrature import IntegralResult, pyramid_rule, richardson_limit
    from utils.config import QuadratureSpec
    from utils.errors import GraphError
    from utils.logger import logger
    from utils.parallel import parallel_map


def _box_sum(compiled: CompiledIntegrand, lower: float, upper: float, nodes: int,
             jobs: int) -> Tuple[complex, float, int]:
    m = compiled.edge_count
    top = tuple(range(m))
    points, weights = pyramid_rule(m, lower, upper, nodes)
    results = parallel_map(evaluate_node_with_scale, [(compiled, p) for p in points], jobs)
    value = sum(w * values.get(top, 0j) for w, (values, _) in zip(weights, results))
    scale = sum(w * scales.get(top, 0.0) for w, (_, scales) in zip(weights, results))
    return complex(value), float(scale), len(weights)


def _box_integral(problem: GraphIntegralProblem, lower: float, upper: float,
                  quadrature: Optional[QuadratureSpec], jobs: int, label: str) -> IntegralResult:
    quadrature = quadrature or QuadratureSpec()
    start = time.time()
    if upper <= lower:
        return IntegralResult(0j, 0.0, 0, quadrature.seed, 0.0, "ok", label, {"scale": 0.0})
    compiled = compile_problem(problem)
    value, scale, used = _box_sum(compiled, lower, upper, quadrature.nodes_per_axis, jobs)
    coarse, _, _ = _box_sum(compiled, lower, upper, quadrature.halved().nodes_per_axis, jobs)
    duration = time.time() - start
    error = abs(value - coarse)
    logger.quadrature(label, used, value, error, duration)
    return IntegralResult(value, error, used, quadrature.seed, duration, "ok", label,
                          {"scale": scale, "problem_hash": problem.problem_hash()})


def w_eps_L(problem: GraphIntegralProblem, quadrature: Optional[QuadratureSpec] = None,
            jobs: int = 1) -> IntegralResult:
    """Integral over [sqrt eps, sqrt L]^m in t~ coordinates."""
    if problem.eps <= 0:
        raise GraphError("w_eps_L needs eps > 0; use w_0_L for the limit")
    return _box_integral(problem, float(np.sqrt(problem.eps)), float(np.sqrt(problem.L)), quadrature, jobs,
                         f"W_eps^L(eps={problem.eps:g})")


def w_0_L(problem: GraphIntegralProblem, quadrature: Optional[QuadratureSpec] = None,
          jobs: int = 1) -> IntegralResult:
    """Integral over the whole box [0, sqrt L]^m; the integrand extends to its boundary."""
    return _box_integral(problem, 0.0, float(np.sqrt(problem.L)), quadrature, jobs, "W_0^L")


@dataclass
class UVLimitReport:
    eps: List[float]
    values: List[IntegralResult]
    differences: List[float]
    accelerated: List[complex]
    limit: IntegralResult
    converged: bool
    w0: Optional[IntegralResult] = None
    details: Dict[str, float] = field(default_factory=dict)

    @property
    def matches_w0(self) -> bool:
        if self.w0 is None:
            return False
        tolerance = 3 * (self.limit.error_estimate + self.w0.error_estimate)
        return abs(self.limit.value - self.w0.value) <= max(tolerance, 1e-6 * self.w0.details.get("scale", 0.0))


def leading_order(differences: Sequence[float], max_order: int = 4) -> int:
    """Leading power of sqrt eps in W_0^L - W_eps^L, read off the last two differences.

    Successive eps differ by 4, so consecutive differences shrink by 2^order.
    """
    pairs = [(a, b) for a, b in zip(differences, differences[1:]) if a > 0 and b > 0]
    if not pairs:
        return 1
    a, b = pairs[-1]
    return int(np.clip(np.rint(np.log2(a / b)), 1, max_order))


def uv_limit(problem: GraphIntegralProblem, k_max: int = 6, quadrature: Optional[QuadratureSpec] = None,
             jobs: int = 1, compare_w0: bool = True, rtol: float = 1e-3) -> UVLimitReport:
    """W_eps^L on eps = L 4^{-k}, k = 1..k_max, with Richardson acceleration in sqrt eps.

    The first eliminated power comes from leading_order(). Converged when the
    last three accelerated values agree within rtol.
    """
    if not 1 <= k_max <= 14:
        raise GraphError(f"k_max must lie in 1..14, got {k_max}")
    eps = [problem.L * 4.0 ** (-k) for k in range(1, k_max + 1)]
    values = [w_eps_L(problem.with_eps(e), quadrature, jobs) for e in eps]
    raw = [v.value for v in values]
    differences = [abs(b - a) for a, b in zip(raw, raw[1:])]
    order = leading_order(differences)
    accelerated = [complex(richardson_limit(2.0, raw[:j], order)[0]) for j in range(2, len(raw) + 1)]
    best, extrapolation_error = richardson_limit(2.0, raw, order)
    best = complex(best)
    scale = max(1.0, abs(best))
    tail = accelerated[-3:]
    converged = len(tail) == 3 and max(abs(a - b) for a in tail for b in tail) <= rtol * scale
    error = float(np.real(extrapolation_error)) + values[-1].error_estimate
    status = "ok" if converged else "flagged"
    logger.extrapolation("uv_limit", len(raw), status)
    limit = IntegralResult(best, error, sum(v.nodes_used for v in values), values[-1].seed,
                           sum(v.runtime for v in values), status, "W_0^L (eps -> 0)")
    w0 = w_0_L(problem, quadrature, jobs) if compare_w0 else None
    return UVLimitReport(eps, values, differences, accelerated, limit, converged, w0, {"leading_order": order})


# several components


def disjoint_union(problems: Sequence[GraphIntegralProblem]) -> GraphIntegralProblem:
    """One absolute-mode problem on the disjoint union; Phi is the ordered product of the sources."""
    if not problems:
        raise GraphError("need at least one component")
    sig, L = problems[0].sig, problems[0].L
    edges: List[Edge] = []
    widths: List[float] = []
    source_form = Form.scalar(1)
    offset = 0
    for p in problems:
        if p.sig != sig or p.L != L:
            raise GraphError("components must share the signature and L")
        if p.source.mode != "absolute":
            raise GraphError("components factorization needs absolute-mode sources")
        edges += [Edge(e.head + offset, e.tail + offset, e.decoration) for e in p.graph.edges]
        widths += [p.source.width(v) for v in range(1, p.graph.vertex_count + 1)]
        source_form = wedge(source_form, _shift_vertices(p.source.polyform, offset))
        offset += p.graph.vertex_count
    graph = DecoratedGraph(offset, tuple(edges))
    source = TestSource(source_form, problems[0].source.sigma, tuple(widths), "absolute")
    return GraphIntegralProblem(graph, sig, source, L, 0.0, allow_disconnected=True)


def _shift_vertices(form: Form, offset: int) -> Form:
    if offset == 0:
        return form
    symbols = set(form.free_symbols()) | {g.symbol for g in form.generators()}
    substitution = {}
    for s in symbols:
        gen = generator_of(s)
        vertex, k = gen.index
        substitution[s] = coordinate(gen.kind, vertex + offset, k)
    return pullback(form, substitution)


@dataclass
class FactorizationReport:
    union: IntegralResult
    components: List[IntegralResult]
    product: complex
    sign: int
    agrees: bool


def components_factorization(problems: Sequence[GraphIntegralProblem],
                             quadrature: Optional[QuadratureSpec] = None, jobs: int = 1) -> FactorizationReport:
    """W_0^L of a disjoint union against the product of the component values, up to sign."""
    union = w_0_L(disjoint_union(problems), quadrature, jobs)
    parts = [w_0_L(p, quadrature, jobs) for p in problems]
    product = complex(np.prod([p.value for p in parts]))
    relative_error = sum(p.error_estimate / max(abs(p.value), 1e-300) for p in parts)
    tolerance = 3 * (union.error_estimate + abs(product) * relative_error) + 1e-9 * max(1.0, abs(product))
    sign = 1 if abs(union.value - product) <= abs(union.value + product) else -1
    agrees = abs(union.value - sign * product) <= tolerance
    logger.check_result("components factorization", agrees, abs(union.value - sign * product), tolerance)
    return FactorizationReport(union, parts, product, sign, agrees)

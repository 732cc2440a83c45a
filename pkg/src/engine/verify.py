"""Verification suites: each returns CheckResult rows with measured values and tolerances."""
import time
from dataclasses import replace
from typing import Callable, Dict, List, Optional

import numpy as np
import sympy as sp

from .anomaly import (anomaly_functional, anomaly_source, localization_check, parity_source,
                      reflection_parity_check)
from .boundary import boundary_identity_check, subgraph_boundary_reduction
from .checks import CheckResult, exponent_bound_check, kontsevich_check, rank_vanishing_check
from .integrals import uv_limit
from .problem import GraphIntegralProblem, TestSource

try:
    from ..data.graph_library import banana, chain_with_doubled_edge, get_graph, graph_names, single_edge, \
        square, theta, triangle
    from ..forms.exterior import coordinate, sampled_max_abs
    from ..graphs.decorated_graph import Signature
    from ..graphs.laplacian import (d_inverse_entry, d_inverse_matrix, kirchhoff_det, laplacian_inverse_entry,
                                    weighted_laplacian)
    from ..kernels.bochner_martinelli import bochner_martinelli_components, regularized_propagator_components
    from ..kernels.heat import SpacetimePoint
    from ..kernels.propagator import euler_contraction, schwinger_propagator, total_differential
    from ..schwinger.strata import fit_sign_table, form_from_flux, stokes_basket
    from ..utils.config import QuadratureSpec
    from ..utils.errors import ConfigError, FeynLabError, GraphError
    from ..utils.logger import logger
except ImportError:
    from data.graph_library import banana, chain_with_doubled_edge, get_graph, graph_names, single_edge, \
        square, theta, triangle
    from forms.exterior import coordinate, sampled_max_abs
    from graphs.decorated_graph import Signature
    from graphs.laplacian import (d_inverse_entry, d_inverse_matrix, kirchhoff_det, laplacian_inverse_entry,
                                  weighted_laplacian)
    from kernels.bochner_martinelli import bochner_martinelli_components, regularized_propagator_components
    from kernels.heat import SpacetimePoint
    from kernels.propagator import euler_contraction, schwinger_propagator, total_differential
    from schwinger.strata import fit_sign_table, form_from_flux, stokes_basket
    from utils.config import QuadratureSpec
    from utils.errors import ConfigError, FeynLabError, GraphError
    from utils.logger import logger

SIGNATURES = [Signature(1, 0), Signature(2, 0), Signature(0, 1), Signature(0, 2),
              Signature(1, 1), Signature(1, 2), Signature(2, 1)]
MATRIX_TOL = 1e-10
BM_TOL = 1e-5
STOKES_TOL = 1e-6


def _connected_library():
    return [(name, get_graph(name)) for name in graph_names()]


def _zero_result(name: str, result, extra: Optional[Dict] = None) -> CheckResult:
    scale = result.details.get("scale", 0.0)
    tolerance = max(3 * result.error_estimate, 1e-6 * scale)
    details = {"value_re": result.value.real, "value_im": result.value.imag, "status": result.status}
    details.update(extra or {})
    passed = result.is_zero(scale)
    logger.check_result(name, passed, abs(result.value), tolerance)
    return CheckResult(name, passed, abs(result.value), tolerance, details)


def suite_kirchhoff(quadrature: QuadratureSpec, jobs: int, seed: int) -> List[CheckResult]:
    rng = np.random.default_rng(seed)
    graphs = _connected_library()
    worst, worst_flip = 0.0, 0.0
    for _ in range(50):
        name, g = graphs[rng.integers(len(graphs))]
        t = rng.uniform(0.1, 3.0, g.edge_count)
        laplacian = weighted_laplacian(g, t)
        dense = np.linalg.det(laplacian)
        worst = max(worst, abs(kirchhoff_det(g, t) - dense) / abs(dense))
        # rho^T diag(1/t) rho only sees rows up to sign
        flipped = weighted_laplacian(g.reversed_edge(int(rng.integers(g.edge_count))), t)
        worst_flip = max(worst_flip, float(np.max(np.abs(flipped - laplacian))))
    results = [
        CheckResult("matrix-tree determinant", worst <= MATRIX_TOL, worst, MATRIX_TOL, {"pairs": 50}),
        CheckResult("laplacian under edge reversal", worst_flip <= MATRIX_TOL, worst_flip, MATRIX_TOL, {"pairs": 50}),
    ]
    for r in results:
        logger.check_result(r.name, r.passed, r.measured, r.tolerance)
    return results


def suite_inverse(quadrature: QuadratureSpec, jobs: int, seed: int, bound_samples: int = 10000) -> List[CheckResult]:
    rng = np.random.default_rng(seed)
    worst_m, worst_d = 0.0, 0.0
    for name, g in _connected_library():
        for _ in range(5):
            t = rng.uniform(0.1, 3.0, g.edge_count)
            inverse = np.linalg.inv(weighted_laplacian(g, t))
            dense_d = d_inverse_matrix(g, t)
            for i in range(1, g.vertex_count):
                for j in range(1, g.vertex_count):
                    exact = inverse[i - 1, j - 1]
                    worst_m = max(worst_m, abs(laplacian_inverse_entry(g, t, i, j) - exact) / max(abs(exact), 1e-300))
                for e in range(g.edge_count):
                    exact = dense_d[e, i - 1]
                    worst_d = max(worst_d, abs(d_inverse_entry(g, t, e, i) - exact) / max(abs(exact), 1.0))
    largest = 0.0
    graphs = _connected_library()
    for k in range(bound_samples):
        _, g = graphs[k % len(graphs)]
        t = np.exp(rng.uniform(-6.0, 6.0, g.edge_count))
        largest = max(largest, float(np.max(np.abs(d_inverse_matrix(g, t)))))
    results = [
        CheckResult("laplacian inverse (cut formula)", worst_m <= MATRIX_TOL, worst_m, MATRIX_TOL),
        CheckResult("d inverse (cut formula)", worst_d <= MATRIX_TOL, worst_d, MATRIX_TOL),
        CheckResult("|d inverse| <= 2", largest <= 2.0 + 1e-12, largest, 2.0, {"samples": bound_samples}),
    ]
    for r in results:
        logger.check_result(r.name, r.passed, r.measured, r.tolerance)
    return results


def suite_exponent(quadrature: QuadratureSpec, jobs: int, seed: int) -> List[CheckResult]:
    return [exponent_bound_check(g, 1000, seed) for g in (single_edge(), banana(), triangle(), square())]


def suite_propagator(quadrature: QuadratureSpec, jobs: int, seed: int) -> List[CheckResult]:
    results = []
    for sig in SIGNATURES:
        closed = sampled_max_abs(total_differential(schwinger_propagator(sig)), 100, seed)
        euler = sampled_max_abs(euler_contraction(sig), 100, seed)
        for name, value in ((f"propagator closed {sig}", closed), (f"propagator Euler contraction {sig}", euler)):
            passed = value <= MATRIX_TOL
            logger.check_result(name, passed, value, MATRIX_TOL)
            results.append(CheckResult(name, passed, value, MATRIX_TOL))
    return results


def suite_bm(quadrature: QuadratureSpec, jobs: int, seed: int) -> List[CheckResult]:
    rng = np.random.default_rng(seed)
    results = []
    for sig in (Signature(1, 0), Signature(1, 1)):
        worst = 0.0
        for _ in range(20):
            direction = rng.normal(size=sig.real_dimension)
            point = direction / np.linalg.norm(direction) * rng.uniform(0.05, 0.3)
            p = SpacetimePoint.from_euclidean(sig, point)
            limit = bochner_martinelli_components(sig, p, "heat")
            regularized = regularized_propagator_components(sig, 1e-8, 1e4, p, method="gamma")
            worst = max(worst, float(np.max(np.abs(regularized - limit)) / np.max(np.abs(limit))))
        name = f"Bochner-Martinelli limit {sig}"
        logger.check_result(name, worst <= BM_TOL, worst, BM_TOL)
        results.append(CheckResult(name, worst <= BM_TOL, worst, BM_TOL, {"points": 20}))
    return results


UV_CASES = [("single_edge", Signature(1, 1)), ("banana", Signature(1, 0)), ("banana", Signature(0, 1)),
            ("square", Signature(1, 0))]
# square: 4 pyramids of nodes^4 points at every eps
UV_MAX_NODES = {"square": 8}


def suite_uv(quadrature: QuadratureSpec, jobs: int, seed: int, k_max: int = 6) -> List[CheckResult]:
    results = []
    for name, sig in UV_CASES:
        g = get_graph(name)
        nodes = min(quadrature.nodes_per_axis, UV_MAX_NODES.get(name, quadrature.nodes_per_axis))
        problem = GraphIntegralProblem(g, sig, TestSource.balanced(sig, g))
        report = uv_limit(problem, k_max, replace(quadrature, nodes_per_axis=nodes), jobs)
        difference = abs(report.limit.value - report.w0.value)
        tolerance = 3 * (report.limit.error_estimate + report.w0.error_estimate)
        passed = report.converged and report.matches_w0
        logger.check_result(f"UV limit {name} {sig}", passed, difference, tolerance)
        results.append(CheckResult(f"UV limit {name} {sig}", passed, difference, tolerance,
                                   {"limit_re": report.limit.value.real, "w0_re": report.w0.value.real,
                                    "converged": report.converged,
                                    "leading_order": report.details["leading_order"], "nodes": nodes}))
    return results


def suite_rank(quadrature: QuadratureSpec, jobs: int, seed: int) -> List[CheckResult]:
    cases = [(banana(), Signature(2, 0)), (theta(), Signature(1, 1)), (theta(), Signature(1, 0)),
             (triangle(), Signature(1, 1))]
    return [rank_vanishing_check(g, sig, 100, seed) for g, sig in cases]


def suite_kontsevich(quadrature: QuadratureSpec, jobs: int, seed: int) -> List[CheckResult]:
    return [kontsevich_check(banana()), kontsevich_check(theta())]


def suite_anomaly(quadrature: QuadratureSpec, jobs: int, seed: int) -> List[CheckResult]:
    sig = Signature(1, 1)
    g = triangle()
    problem = GraphIntegralProblem(g, sig, anomaly_source(sig, g))
    results = [_zero_result(f"anomaly vanishes, odd h1 triangle {sig}", anomaly_functional(problem, quadrature, jobs))]
    mixed = problem.with_source(parity_source(sig, g))
    parity = reflection_parity_check(mixed, quadrature, jobs)
    results.append(CheckResult(f"reflection parity triangle {sig}", parity.passed, parity.discrepancy,
                               parity.tolerance, {"betti_1": parity.betti_1,
                                                  "original_re": parity.original.value.real,
                                                  "reflected_re": parity.reflected.value.real}))
    local = localization_check(mixed, quadrature=quadrature, jobs=jobs)
    results.append(CheckResult(f"anomaly localization triangle {sig}", local.passed, local.discrepancy,
                               local.tolerance, {"original_re": local.original.value.real,
                                                 "perturbed_re": local.perturbed.value.real}))
    return results


def suite_dprime2(quadrature: QuadratureSpec, jobs: int, seed: int) -> List[CheckResult]:
    results = []
    for g, sig in ((triangle(), Signature(0, 2)), (square(), Signature(1, 2))):
        problem = GraphIntegralProblem(g, sig, anomaly_source(sig, g))
        results.append(_zero_result(f"anomaly vanishes, d'=2 {g.vertex_count} vertices {sig}",
                                    anomaly_functional(problem, quadrature, jobs)))
    return results


def suite_boundary(quadrature: QuadratureSpec, jobs: int, seed: int) -> List[CheckResult]:
    results = []
    sig = Signature(1, 0)
    for name, g in (("single_edge", single_edge()), ("banana", banana())):
        problem = GraphIntegralProblem(g, sig, TestSource.default(sig, g, codegree=1))
        report = boundary_identity_check(problem, quadrature, jobs)
        results.append(CheckResult(f"boundary identity {name} {sig}", report.passed, report.discrepancy,
                                   max(1e-3 * abs(report.left.value), 3 * (report.left.error_estimate
                                                                           + report.right.error_estimate)),
                                   {"left_re": report.left.value.real, "right_re": report.right.value.real}))
    g = chain_with_doubled_edge()
    problem = GraphIntegralProblem(g, sig, TestSource.default(sig, g, codegree=1))
    reduction = subgraph_boundary_reduction(problem, (0, 1), quadrature, jobs)
    if reduction.factored is None:
        raise GraphError(f"subgraph reduction returned {reduction.status} for the banana in the chain")
    discrepancy = abs(reduction.direct.value - reduction.factored.value)
    results.append(CheckResult("subgraph stratum: banana in chain (1,0)", reduction.agrees, discrepancy,
                               max(1e-3 * abs(reduction.direct.value),
                                   3 * (reduction.direct.error_estimate + reduction.factored.error_estimate)),
                               {"direct_re": reduction.direct.value.real,
                                "factored_re": reduction.factored.value.real, "status": reduction.status}))
    return results


def suite_stokes(quadrature: QuadratureSpec, jobs: int, seed: int) -> List[CheckResult]:
    t0, t1 = coordinate("tt", 0), coordinate("tt", 1)
    forms = stokes_basket(2) + [form_from_flux([sp.exp(-t0 * t1), t0 * t1], 2),
                                form_from_flux([t1 ** 2, 1 + t0 ** 3], 2)]
    fit = fit_sign_table(banana(), 1.0, forms, quadrature)
    passed = fit.agrees and fit.residual <= STOKES_TOL
    return [CheckResult("Stokes sign table (banana square)", passed, fit.residual, STOKES_TOL,
                        {"forms": len(forms), "fitted": fit.fitted})]


SUITES: Dict[str, Callable[..., List[CheckResult]]] = {
    "kirchhoff": suite_kirchhoff,
    "inverse": suite_inverse,
    "exponent": suite_exponent,
    "propagator": suite_propagator,
    "bm": suite_bm,
    "uv": suite_uv,
    "rank": suite_rank,
    "kontsevich": suite_kontsevich,
    "anomaly": suite_anomaly,
    "dprime2": suite_dprime2,
    "boundary": suite_boundary,
    "stokes": suite_stokes,
}


def suite_names() -> List[str]:
    return list(SUITES) + ["all"]


def run_suite(name: str, quadrature: Optional[QuadratureSpec] = None, jobs: int = 1,
              seed: int = 0) -> List[CheckResult]:
    """Run one suite (or all); a suite that raises becomes a failed row."""
    if name not in suite_names():
        raise ConfigError(f"unknown suite '{name}', expected one of {suite_names()}")
    quadrature = quadrature or QuadratureSpec()
    selected = list(SUITES) if name == "all" else [name]
    results: List[CheckResult] = []
    for suite in selected:
        start = time.time()
        try:
            results += SUITES[suite](quadrature, jobs, seed)
        except (FeynLabError, np.linalg.LinAlgError) as e:
            logger.error(f"suite {suite} failed: {e}")
            results.append(CheckResult(suite, False, float("nan"), float("nan"), {"error": str(e)}))
        logger.performance(f"verify {suite}", time.time() - start)
    return results

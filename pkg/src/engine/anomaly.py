"""Anomaly functionals O_(Gamma,n): the integrand's flux through the origin stratum.

With the base vertex pinned (relative sources) a Laman graph's reduced
integrand is an (m-1)-form on the Schwinger box. It is invariant under
t~ -> l t~ when the source is the holomorphic monomial of degree d(m - |V| + 1),
and O is its flux through the unit sphere patch at the origin:
lim_{r->0} r^{m-1} int_{S^{m-1}_+} sum_e xi_e F_e.
"""
import time
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np
import sympy as sp

from .problem import GraphIntegralProblem, TestSource
from .reducer import compile_problem, evaluate_node, evaluate_node_with_scale

try:
    from ..forms.exterior import coordinate
    from ..graphs.decorated_graph import DecoratedGraph, Signature, betti_1
    from ..graphs.laman import is_laman
    from ..schwinger.quadrature import IntegralResult, flux_components, sphere_patch_quadrature
    from ..schwinger.strata import EXTRAPOLATION_TOL, origin_limit_values
    from ..utils.config import QuadratureSpec
    from ..utils.errors import GraphError
    from ..utils.logger import logger
    from ..utils.parallel import parallel_map
except ImportError:
    from forms.exterior import coordinate
    from graphs.decorated_graph import DecoratedGraph, Signature, betti_1
    from graphs.laman import is_laman
    from schwinger.quadrature import IntegralResult, flux_components, sphere_patch_quadrature
    from schwinger.strata import EXTRAPOLATION_TOL, origin_limit_values
    from utils.config import QuadratureSpec
    from utils.errors import GraphError
    from utils.logger import logger
    from utils.parallel import parallel_map


def reduced_flux(problem: GraphIntegralProblem, jobs: int = 1, absolute: bool = False):
    """Flux field F(t~) of the reduced (m-1)-form; absolute=True gives the |.| scale field."""
    compiled = compile_problem(problem)
    m = problem.edge_count
    edges = list(range(m))

    def flux(points: np.ndarray) -> np.ndarray:
        worker = evaluate_node_with_scale if absolute else evaluate_node
        results = parallel_map(worker, [(compiled, p) for p in points], jobs)
        out = np.zeros((len(points), m), dtype=complex)
        for i, result in enumerate(results):
            values = result[1] if absolute else result
            components = flux_components(values, edges)
            out[i] = [abs(components[e]) if absolute else components[e] for e in edges]
        return out

    return flux


def anomaly_source(sig: Signature, graph: DecoratedGraph, sigma: float = 1.0) -> TestSource:
    """Relative source dz of every non-base vertex times z_{1,1}^{d(m - |V| + 1)}."""
    power = sig.d * (graph.edge_count - graph.vertex_count + 1)
    polynomial = coordinate("z", 1, 1) ** power if sig.d and power > 0 else sp.Integer(1)
    return TestSource.default(sig, graph, mode="relative", codegree=1, polynomial=polynomial, sigma=sigma)


def parity_source(sig: Signature, graph: DecoratedGraph, sigma: float = 1.0) -> TestSource:
    """anomaly_source with z_{1,1}^p replaced by z_{1,1}^p + z_{1,1}^{p-1} x_{1,1}.

    Both terms keep the reduced form R+-invariant; the second is odd under
    x_1 -> -x_1, so O and O(r* Phi) differ by more than a sign.
    """
    power = sig.d * (graph.edge_count - graph.vertex_count + 1)
    if sig.d_prime < 1 or power < 1:
        raise GraphError(f"a mixed-parity source needs d' >= 1 and a positive z power, got {sig} "
                         f"and power {power}")
    z, x = coordinate("z", 1, 1), coordinate("x", 1, 1)
    polynomial = sp.expand(z ** power + z ** (power - 1) * x)
    return TestSource.default(sig, graph, mode="relative", codegree=1, polynomial=polynomial, sigma=sigma)


def _sphere_flux(problem: GraphIntegralProblem, flux, nodes: int, quadrature: QuadratureSpec, mc_samples: int):
    m = problem.edge_count
    xi, weights = sphere_patch_quadrature(m, nodes, mc_samples, quadrature.seed)
    limits, errors = origin_limit_values(tuple(range(m)), m, flux, xi, np.zeros((1, 0)), problem.L,
                                         quadrature.richardson_levels)
    return complex(np.sum(weights * limits)), float(np.sum(weights * np.abs(errors))), len(weights)


def anomaly_functional(problem: GraphIntegralProblem, quadrature: Optional[QuadratureSpec] = None,
                       jobs: int = 1) -> IntegralResult:
    """O_(Gamma,n)(Phi): pointwise Richardson limit in r, then sphere-patch quadrature."""
    quadrature = quadrature or QuadratureSpec()
    graph = problem.graph
    if not graph.is_connected():
        raise GraphError("anomaly functionals need a connected graph")
    start = time.time()
    flux = reduced_flux(problem, jobs)
    value, extrapolation_error, used = _sphere_flux(problem, flux, quadrature.nodes_per_axis, quadrature,
                                                    quadrature.mc_samples)
    coarse = quadrature.halved()
    coarse_value, _, _ = _sphere_flux(problem, flux, coarse.nodes_per_axis, quadrature, coarse.mc_samples)
    scale, _, _ = _sphere_flux(problem, reduced_flux(problem, jobs, absolute=True), quadrature.nodes_per_axis,
                               quadrature, quadrature.mc_samples)
    error = abs(value - coarse_value) + extrapolation_error
    status = "ok" if extrapolation_error <= EXTRAPOLATION_TOL * max(1.0, abs(value)) else "flagged"
    duration = time.time() - start
    logger.extrapolation("anomaly_functional", quadrature.richardson_levels, status)
    logger.quadrature("anomaly_functional", used, value, error, duration)
    result = IntegralResult(value, error, used, quadrature.seed, duration, status, "O",
                            {"scale": abs(scale), "laman": is_laman(graph, problem.sig),
                             "betti_1": betti_1(graph), "problem_hash": problem.problem_hash()})
    result.details["is_zero"] = result.is_zero(abs(scale))
    return result


def scaling_degree(problem: GraphIntegralProblem, tt: Sequence[float],
                   lambdas: Sequence[float] = (1.0, 2.0, 4.0)) -> Dict[tuple, float]:
    """Fitted homogeneity degree of every nonzero reduced coefficient under t~ -> l t~."""
    compiled = compile_problem(problem)
    tt = np.asarray(tt, dtype=float)
    samples = [compiled.coefficients(l * tt) for l in lambdas]
    degrees = {}
    for key in samples[0]:
        magnitudes = [abs(s.get(key, 0j)) for s in samples]
        if min(magnitudes) == 0.0:
            continue
        slope = np.polyfit(np.log(lambdas), np.log(magnitudes), 1)[0]
        degrees[key] = float(slope)
    return degrees


@dataclass
class ParityReport:
    original: IntegralResult
    reflected: IntegralResult
    betti_1: int
    discrepancy: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.discrepancy <= self.tolerance


def reflection_parity_check(problem: GraphIntegralProblem, quadrature: Optional[QuadratureSpec] = None,
                            jobs: int = 1) -> ParityReport:
    """O(Phi) = (-1)^{h_1} O(r* Phi) for the reflection x_1 -> -x_1."""
    if problem.sig.d_prime < 1:
        raise GraphError("the reflection check needs d' >= 1")
    h1 = betti_1(problem.graph)
    original = anomaly_functional(problem, quadrature, jobs)
    reflected = anomaly_functional(problem.with_source(problem.source.reflected()), quadrature, jobs)
    discrepancy = abs(original.value - (-1) ** h1 * reflected.value)
    scale = max(original.details["scale"], reflected.details["scale"])
    tolerance = max(3 * (original.error_estimate + reflected.error_estimate), 1e-6 * scale)
    passed = discrepancy <= tolerance
    logger.check_result(f"reflection parity (h1={h1})", passed, discrepancy, tolerance)
    return ParityReport(original, reflected, h1, discrepancy, tolerance)


@dataclass
class LocalizationReport:
    original: IntegralResult
    perturbed: IntegralResult
    discrepancy: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.discrepancy <= self.tolerance


def default_perturbation(sig: Signature) -> sp.Expr:
    """A factor 1 + f with f vanishing, with every holomorphic derivative, on the diagonal."""
    if sig.d:
        return 1 + coordinate("z", 1, 1) * coordinate("zbar", 1, 1)
    return 1 + coordinate("x", 1, 1) ** 2


def localization_check(problem: GraphIntegralProblem, perturbation: Optional[sp.Expr] = None,
                       quadrature: Optional[QuadratureSpec] = None, jobs: int = 1) -> LocalizationReport:
    """Two sources with the same holomorphic jets at the diagonal give the same O."""
    factor = perturbation if perturbation is not None else default_perturbation(problem.sig)
    original = anomaly_functional(problem, quadrature, jobs)
    perturbed = anomaly_functional(problem.with_source(problem.source.scaled_polynomial(factor)), quadrature, jobs)
    discrepancy = abs(original.value - perturbed.value)
    scale = max(original.details["scale"], perturbed.details["scale"])
    tolerance = max(3 * (original.error_estimate + perturbed.error_estimate), 1e-6 * scale)
    passed = discrepancy <= tolerance
    logger.check_result("anomaly localization", passed, discrepancy, tolerance)
    return LocalizationReport(original, perturbed, discrepancy, tolerance)

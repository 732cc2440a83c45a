"""Vanishing theorems and bounds checked numerically on a single graph."""
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Dict, Optional

import numpy as np

from .problem import GraphIntegralProblem, TestSource
from .reducer import compile_problem

try:
    from ..graphs.combinatorics import incidence_matrix
    from ..graphs.decorated_graph import DecoratedGraph, Signature, betti_1
    from ..graphs.laman import rank_vanishing_witness
    from ..graphs.laplacian import weighted_laplacian
    from ..utils.errors import GraphError
    from ..utils.logger import logger
except ImportError:
    from graphs.combinatorics import incidence_matrix
    from graphs.decorated_graph import DecoratedGraph, Signature, betti_1
    from graphs.laman import rank_vanishing_witness
    from graphs.laplacian import weighted_laplacian
    from utils.errors import GraphError
    from utils.logger import logger

RANK_VANISHING_TOL = 1e-10
ZERO_SCALE_TOL = 1e-6


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    details: Dict[str, Any] = field(default_factory=dict)

    def to_record(self) -> Dict[str, Any]:
        record = {"check": self.name, "passed": self.passed, "measured": self.measured,
                  "tolerance": self.tolerance}
        for key in sorted(self.details):
            record[key] = self.details[key]
        return record


def _log(result: CheckResult) -> CheckResult:
    logger.check_result(result.name, result.passed, result.measured, result.tolerance)
    return result


def kontsevich_check(g: DecoratedGraph, grid: int = 5, lower: float = 0.2, upper: float = 1.0) -> CheckResult:
    """At (d, d') = (0, 2) the position integral of the graph integrand with Phi = 1 is the zero form."""
    sig = Signature(0, 2)
    if not g.is_connected():
        raise GraphError("the Kontsevich check needs a connected graph")
    h1 = betti_1(g)
    if h1 < 1:
        raise GraphError("the Kontsevich check needs h1 >= 1; trees are not covered")
    problem = GraphIntegralProblem(g, sig, TestSource.gaussian([], 1, mode="relative"))
    compiled = compile_problem(problem)
    axis = np.linspace(lower, upper, grid)
    worst, worst_ratio, nodes = 0.0, 0.0, 0
    for tt in product(axis, repeat=g.edge_count):
        values, scales = compiled.coefficients(np.array(tt), with_scale=True)
        nodes += 1
        for key, value in values.items():
            worst = max(worst, abs(value))
            if scales[key] > 0:
                worst_ratio = max(worst_ratio, abs(value) / scales[key])
    return _log(CheckResult(f"kontsevich (h1={h1}, {g.edge_count} edges)", worst_ratio <= ZERO_SCALE_TOL,
                            worst_ratio, ZERO_SCALE_TOL, {"nodes": nodes, "max_abs": worst,
                                                          "components": len(compiled.terms)}))


def rank_vanishing_check(g: DecoratedGraph, sig: Signature, samples: int = 100, seed: int = 0,
                         source: Optional[TestSource] = None) -> CheckResult:
    """Subgraph-count witness, cross-checked by evaluating the reduced integrand at random nodes.

    passed means the numeric values agree with the verdict: all zero when a
    witness exists, otherwise no claim is checked.
    """
    witness = rank_vanishing_witness(g, sig)
    problem = GraphIntegralProblem(g, sig, source or TestSource.default(sig, g))
    compiled = compile_problem(problem)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        values, scales = compiled.coefficients(rng.uniform(0.1, 2.0, g.edge_count), with_scale=True)
        for key, value in values.items():
            worst = max(worst, abs(value) / max(1.0, scales[key]))
    passed = witness is None or worst <= RANK_VANISHING_TOL
    return _log(CheckResult(f"rank vanishing {sig}", passed, worst, RANK_VANISHING_TOL,
                            {"vanishes": witness is not None, "witness": list(witness or ()), "samples": samples}))


def exponent_constant(g: DecoratedGraph) -> float:
    """c = |E| max |(rho rho^T)_{ee'}| with the full incidence matrix."""
    rho = incidence_matrix(g).astype(float)
    return float(g.edge_count * np.max(np.abs(rho @ rho.T)))


def exponent_bound_check(g: DecoratedGraph, samples: int = 1000, seed: int = 0,
                         lower: float = 0.01, upper: float = 3.0) -> CheckResult:
    """min eig of M(t~)^-1 M(t~^2) M(t~)^-1 >= 1/c at random t~."""
    if not g.is_connected():
        raise GraphError("the exponent bound needs a connected graph")
    c = exponent_constant(g)
    rng = np.random.default_rng(seed)
    smallest = np.inf
    violations = 0
    for _ in range(samples):
        tt = rng.uniform(lower, upper, g.edge_count)
        inverse = np.linalg.inv(weighted_laplacian(g, tt))
        sandwich = inverse @ weighted_laplacian(g, tt ** 2) @ inverse
        eig = float(np.min(np.linalg.eigvalsh(0.5 * (sandwich + sandwich.T))))
        smallest = min(smallest, eig)
        if eig < 1.0 / c - 1e-12:
            violations += 1
    return _log(CheckResult(f"exponent bound (c={c:g})", violations == 0, smallest, 1.0 / c,
                            {"constant": c, "violations": violations, "samples": samples}))

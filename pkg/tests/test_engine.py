#!/usr/bin/env python3
"""
FeynLab Engine Test Suite
Problems, sources, position reduction, graph integrals and checks
"""

import os
import sys

import numpy as np
import pytest

sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'src'))

from data.graph_library import banana, chain_with_doubled_edge, path_tree, single_edge, triangle  # noqa: E402
from engine.anomaly import (anomaly_functional, anomaly_source, localization_check, parity_source,  # noqa: E402
                            reflection_parity_check, scaling_degree)
from engine.boundary import boundary_identity_check, subgraph_boundary_reduction  # noqa: E402
from engine.checks import (exponent_bound_check, exponent_constant, kontsevich_check,  # noqa: E402
                           rank_vanishing_check)
from engine.integrals import (components_factorization, disjoint_union, leading_order, uv_limit,  # noqa: E402
                              w_0_L, w_eps_L)
from engine.problem import GraphIntegralProblem, TestSource  # noqa: E402
from engine.reducer import brute_force_reduce, compile_problem, integral_sign, reduce_positions  # noqa: E402
from engine.verify import run_suite, suite_names  # noqa: E402
from forms.exterior import Form, Generator, coordinate  # noqa: E402
from graphs.decorated_graph import DecoratedGraph, Signature  # noqa: E402
from utils.config import QuadratureSpec  # noqa: E402
from utils.errors import ConfigError, FormError, GaussianError, GraphError, NonGaussianError  # noqa: E402

QUICK = QuadratureSpec(nodes_per_axis=8, richardson_levels=4)


def test_integral_sign():
    assert [integral_sign(Signature(1, 0), m) for m in (1, 2)] == [-1, 1]
    assert [integral_sign(Signature(1, 1), m) for m in (1, 2, 3)] == [-1, -1, 1]


def test_problem_validation():
    sig = Signature(1, 0)
    source = TestSource.default(sig, single_edge())
    with pytest.raises(GraphError):
        GraphIntegralProblem(single_edge(), sig, source, L=0.0)
    with pytest.raises(GraphError):
        GraphIntegralProblem(single_edge(), sig, source, L=1.0, eps=2.0)
    split = DecoratedGraph.from_arrows(4, [(1, 2), (3, 4)])
    with pytest.raises(GraphError):
        GraphIntegralProblem(split, sig, TestSource.default(sig, split))
    with pytest.raises(FormError):
        GraphIntegralProblem(single_edge(), sig, TestSource.gaussian([Generator.of("z", 2, 1)], mode="relative"))


def test_problem_hash_is_stable():
    sig = Signature(1, 1)
    problem = GraphIntegralProblem(triangle(), sig, TestSource.default(sig, triangle()))
    assert len(problem.problem_hash()) == 16
    assert problem.problem_hash() == GraphIntegralProblem(triangle(), sig,
                                                          TestSource.default(sig, triangle())).problem_hash()
    assert problem.with_eps(0.25).problem_hash() != problem.problem_hash()


def test_source_validation():
    with pytest.raises(FormError):
        TestSource(Form.scalar(1), mode="gaussian")
    with pytest.raises(FormError):
        TestSource(Form.scalar(1), sigma=0.0)
    with pytest.raises(FormError):
        TestSource(Form.one_form(Generator.of("tt", 0), 1))
    with pytest.raises(FormError):
        TestSource.gaussian([], coordinate("z", 1, 1) ** 9)


def test_default_source_degree_count():
    sig = Signature(1, 0)
    g = single_edge()
    assert len(next(iter(TestSource.default(sig, g).polyform.terms))) == 4
    assert len(next(iter(TestSource.default(sig, g, codegree=1).polyform.terms))) == 3
    assert TestSource.balanced(sig, g).polynomial_degree() == 2
    assert TestSource.balanced(Signature(1, 1), g, mode="relative").polynomial_degree() == 1


def test_source_sum_needs_matching_gaussians():
    a = TestSource.gaussian([], 1)
    with pytest.raises(FormError):
        a + TestSource.gaussian([], 1, sigma=2.0)
    assert (a + a).polyform.terms[()] == 2


def test_reflected_source_flips_first_real_axis():
    x = coordinate("x", 1, 1)
    dx = Generator.of("x", 1, 1)
    assert TestSource.gaussian([dx]).reflected().polyform.terms[(dx,)] == -1
    assert TestSource.gaussian([], x).reflected().polyform.terms[()] == -x
    assert TestSource.gaussian([dx], x).reflected().polyform.terms[(dx,)] == x


@pytest.mark.parametrize("sig, mode", [(Signature(1, 0), "absolute"), (Signature(1, 1), "relative")])
def test_reducer_matches_brute_force(sig, mode):
    g = single_edge()
    problem = GraphIntegralProblem(g, sig, TestSource.balanced(sig, g, mode=mode))
    compiled = compile_problem(problem)
    for tt in ((0.7,), (1.3,)):
        reduced = compiled.coefficients(np.array(tt))
        oracle = brute_force_reduce(problem, tt)
        assert max(abs(v) for v in reduced.values()) > 1e-6
        for key in set(reduced) | set(oracle):
            assert reduced.get(key, 0j) == pytest.approx(oracle.get(key, 0j), rel=1e-8, abs=1e-10), (tt, key)


def test_reduce_positions_form():
    sig = Signature(1, 0)
    problem = GraphIntegralProblem(single_edge(), sig, TestSource.balanced(sig, single_edge()))
    form = reduce_positions(problem, [0.9])
    assert form.degrees() == frozenset({1})
    with pytest.raises(GaussianError):
        reduce_positions(problem, [0.9, 0.3])
    with pytest.raises(GaussianError):
        reduce_positions(problem, [0.0])


def test_reducer_limits():
    sig = Signature(1, 0)
    bump = GraphIntegralProblem(single_edge(), sig, TestSource(Form.scalar(1), mode="bump"))
    with pytest.raises(NonGaussianError):
        compile_problem(bump)
    big = GraphIntegralProblem(triangle(), Signature(1, 1), TestSource.default(Signature(1, 1), triangle()))
    with pytest.raises(GaussianError):
        brute_force_reduce(big, (0.5, 0.5, 0.5))


def test_box_integrals():
    sig = Signature(1, 0)
    problem = GraphIntegralProblem(single_edge(), sig, TestSource.balanced(sig, single_edge()))
    with pytest.raises(GraphError):
        w_eps_L(problem)
    whole = w_0_L(problem, QUICK)
    part = w_eps_L(problem.with_eps(0.25), QUICK)
    assert whole.details["problem_hash"] == problem.problem_hash()
    assert abs(whole.value) > 1e-6
    assert abs(part.value) <= part.details["scale"] + 1e-12
    with pytest.raises(GraphError):
        uv_limit(problem, k_max=0)


def test_disjoint_union_requires_absolute_sources():
    sig = Signature(1, 0)
    relative = GraphIntegralProblem(single_edge(), sig, TestSource.balanced(sig, single_edge(), mode="relative"))
    with pytest.raises(GraphError):
        disjoint_union([relative])
    absolute = GraphIntegralProblem(single_edge(), sig, TestSource.balanced(sig, single_edge()))
    union = disjoint_union([absolute, absolute])
    assert union.graph.vertex_count == 4
    assert not union.graph.is_connected()


def test_exponent_constants_and_bound():
    assert exponent_constant(triangle()) == 6
    assert exponent_constant(banana()) == 4
    assert exponent_constant(single_edge()) == 2
    result = exponent_bound_check(triangle(), samples=200, seed=1)
    assert result.passed
    assert result.measured >= 1 / 6 - 1e-12


def test_kontsevich_vanishing():
    assert kontsevich_check(banana(), grid=3).passed
    with pytest.raises(GraphError):
        kontsevich_check(path_tree())


def test_rank_vanishing():
    result = rank_vanishing_check(banana(), Signature(2, 0), samples=10)
    assert result.passed
    assert result.details["vanishes"]
    assert result.details["witness"] == [0, 1]


def test_anomaly_source_power():
    source = anomaly_source(Signature(1, 0), banana())
    assert source.mode == "relative"
    assert source.polynomial_degree() == 1
    assert anomaly_source(Signature(0, 2), triangle()).polynomial_degree() == 0


def test_scaling_degree_of_banana():
    sig = Signature(1, 0)
    problem = GraphIntegralProblem(banana(), sig, anomaly_source(sig, banana()))
    degrees = scaling_degree(problem, (0.4, 0.9))
    assert degrees
    for degree in degrees.values():
        assert degree == pytest.approx(-1.0, abs=1e-6)


def test_subgraph_reduction_rejects_improper_subsets():
    sig = Signature(1, 0)
    g = chain_with_doubled_edge()
    problem = GraphIntegralProblem(g, sig, TestSource.default(sig, g, codegree=1))
    for edges in ((), (0, 1, 2), (0, 5)):
        with pytest.raises(GraphError):
            subgraph_boundary_reduction(problem, edges, QUICK)


def test_suite_registry():
    assert "all" in suite_names()
    with pytest.raises(ConfigError):
        run_suite("everything")
    rows = run_suite("kirchhoff")
    assert rows and all(r.passed for r in rows)
    assert [r.name for r in rows] == ["matrix-tree determinant", "laplacian under edge reversal"]
    assert all(r.passed for r in run_suite("exponent"))


@pytest.mark.slow
def test_uv_limit_matches_w0():
    sig = Signature(1, 0)
    problem = GraphIntegralProblem(single_edge(), sig, TestSource.balanced(sig, single_edge()))
    report = uv_limit(problem, k_max=6, quadrature=QUICK)
    assert len(report.eps) == 6
    assert report.converged
    assert report.matches_w0


@pytest.mark.slow
def test_anomaly_vanishes_for_odd_loop_number():
    sig = Signature(1, 1)
    problem = GraphIntegralProblem(triangle(), sig, anomaly_source(sig, triangle()))
    result = anomaly_functional(problem, QUICK)
    assert result.details["betti_1"] == 1
    assert result.details["is_zero"]


def test_leading_order_from_differences():
    h = 0.5 ** np.arange(6)
    assert leading_order(list(h)) == 1
    assert leading_order(list(h ** 2)) == 2
    assert leading_order(list(h ** 9)) == 4
    assert leading_order([0.0, 0.0, 0.0]) == 1
    assert leading_order([1e-3]) == 1


def test_parity_source_mixes_parities():
    sig = Signature(1, 1)
    source = parity_source(sig, triangle())
    assert coordinate("x", 1, 1) in source.polyform.free_symbols()
    assert source.polynomial_degree() == 1
    assert source.reflected().polyform.terms != source.polyform.terms
    for bad in (Signature(1, 0), Signature(0, 1)):
        with pytest.raises(GraphError):
            parity_source(bad, triangle())


@pytest.mark.slow
def test_reflection_parity_with_mixed_source():
    sig = Signature(1, 1)
    problem = GraphIntegralProblem(triangle(), sig, parity_source(sig, triangle()))
    report = reflection_parity_check(problem, QUICK)
    assert report.betti_1 == 1
    assert report.original.details["scale"] > 0
    assert report.passed


@pytest.mark.slow
def test_anomaly_localization():
    sig = Signature(1, 1)
    problem = GraphIntegralProblem(triangle(), sig, parity_source(sig, triangle()))
    report = localization_check(problem, quadrature=QUICK)
    assert report.passed


@pytest.mark.slow
def test_uv_limit_banana_without_complex_directions():
    sig = Signature(0, 1)
    problem = GraphIntegralProblem(banana(), sig, TestSource.balanced(sig, banana()))
    report = uv_limit(problem, k_max=6, quadrature=QUICK)
    assert 1 <= report.details["leading_order"] <= 4
    assert report.converged
    assert report.matches_w0


@pytest.mark.slow
def test_stokes_suite():
    rows = run_suite("stokes")
    assert len(rows) == 1
    assert rows[0].passed
    assert rows[0].measured <= 1e-6


@pytest.mark.slow
def test_components_factorization():
    sig = Signature(1, 0)
    edge = GraphIntegralProblem(single_edge(), sig, TestSource.balanced(sig, single_edge()))
    report = components_factorization([edge, edge], QUICK)
    assert report.sign in (1, -1)
    assert report.agrees


@pytest.mark.slow
def test_boundary_identity_single_edge():
    sig = Signature(1, 0)
    problem = GraphIntegralProblem(single_edge(), sig, TestSource.default(sig, single_edge(), codegree=1))
    report = boundary_identity_check(problem, QuadratureSpec(nodes_per_axis=12))
    assert report.passed
    assert len(report.per_stratum()) == 2


def main():
    from runner import run_module
    return run_module("FEYNLAB ENGINE TEST SUITE", globals())


if __name__ == "__main__":
    main()

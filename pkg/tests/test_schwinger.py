#!/usr/bin/env python3
"""
FeynLab Schwinger Space Test Suite
Corner charts, extended functions, quadrature and boundary strata
"""

import os
import sys

import numpy as np
import pytest
import sympy as sp

sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'src'))

from data.graph_library import banana, single_edge, square, theta, triangle  # noqa: E402
from forms.exterior import Form, Generator, coordinate, exterior_derivative  # noqa: E402
from graphs.decorated_graph import SchwingerPoint  # noqa: E402
from graphs.laplacian import d_inverse_entry, laplacian_inverse_entry  # noqa: E402
from schwinger.charts import (CornerChart, Flag, chart_to_interior, flags_of, interior_to_chart,  # noqa: E402
                              random_chart, scale_action, t_square)
from schwinger.extended import extended_d_inverse, extended_m_inverse  # noqa: E402
from schwinger.quadrature import (BoxDomain, FaceDomain, IntegralResult, SphereDomain,  # noqa: E402
                                  gauss_legendre, integrate_form, pyramid_rule, richardson_limit,
                                  sphere_patch_area, sphere_patch_quadrature)
from schwinger.strata import (boundary_strata, boundary_sum, fit_sign_table, form_flux,  # noqa: E402
                              form_from_flux, stokes_basket)
from utils.config import QuadratureSpec  # noqa: E402
from utils.errors import ChartError, FormError  # noqa: E402

TT0, TT1 = coordinate("tt", 0), coordinate("tt", 1)
DTT0, DTT1 = Generator.of("tt", 0), Generator.of("tt", 1)
NESTED = Flag(3, (frozenset({0, 1, 2}), frozenset({2})))
QUADRATURE = QuadratureSpec(nodes_per_axis=12)


def test_flag_enumeration():
    assert len(list(flags_of(1))) == 2
    assert len(list(flags_of(2))) == 6
    assert next(iter(flags_of(3))) == Flag.trivial(3)


def test_flag_validation():
    with pytest.raises(ChartError):
        Flag(2, (frozenset({0}), frozenset({0})))
    with pytest.raises(ChartError):
        Flag(2, (frozenset({0}), frozenset({1})))
    assert NESTED.level_of(2) == 2
    assert NESTED.level_edges(1) == (0, 1)


def test_chart_to_interior():
    chart = CornerChart(Flag.single(2), (2.0,), {0: 0.6, 1: 0.8})
    assert chart_to_interior(chart).t == pytest.approx((1.2, 1.6))
    back = interior_to_chart(SchwingerPoint((1.2, 1.6)), Flag.single(2))
    assert back.rho == pytest.approx((2.0,))
    assert back.xi[1] == pytest.approx(0.8)


def test_chart_normalization_is_enforced():
    with pytest.raises(ChartError):
        CornerChart(Flag.single(2), (2.0,), {0: 0.6, 1: 0.6})
    with pytest.raises(ChartError):
        chart_to_interior(CornerChart(Flag.single(2), (0.0,), {0: 0.6, 1: 0.8}))


def test_nested_chart_round_trip():
    rng = np.random.default_rng(3)
    flags = [f for f in flags_of(3) if f.depth]
    for k in range(100):
        flag = NESTED if k % 2 else flags[rng.integers(len(flags))]
        chart = random_chart(flag, rng)
        back = interior_to_chart(chart_to_interior(chart), flag)
        assert back.rho == pytest.approx(chart.rho, rel=1e-10)
        for e in chart.xi:
            assert back.xi[e] == pytest.approx(chart.xi[e], rel=1e-10)
        for e in chart.t:
            assert back.t[e] == pytest.approx(chart.t[e], rel=1e-10)


def test_square_map():
    chart = CornerChart(Flag.single(2), (1.0,), {0: 2 ** -0.5, 1: 2 ** -0.5})
    squared = t_square(chart)
    assert squared.rho[0] == pytest.approx(2 ** -0.5)
    assert squared.xi[0] == pytest.approx(2 ** -0.5)
    rng = np.random.default_rng(5)
    for flag in (NESTED, Flag(3, (frozenset({0, 1}),))):
        chart = random_chart(flag, rng)
        expected = np.square(chart_to_interior(chart).as_array())
        np.testing.assert_allclose(chart_to_interior(t_square(chart)).as_array(), expected, rtol=1e-10)


def test_scale_action():
    rng = np.random.default_rng(9)
    chart = random_chart(Flag(3, (frozenset({0, 1}),)), rng)
    scaled = scale_action(chart, 3.0)
    np.testing.assert_allclose(chart_to_interior(scaled).as_array(),
                               3.0 * chart_to_interior(chart).as_array(), rtol=1e-12)
    with pytest.raises(ChartError):
        scale_action(chart, 0.0)


def test_extended_functions_on_the_boundary():
    g = triangle()
    rng = np.random.default_rng(17)
    boundary = random_chart(Flag.single(3), rng, zero_levels=(0,))
    xi_point = SchwingerPoint(tuple(boundary.xi[e] for e in range(3)))
    for e in range(3):
        for j in (1, 2):
            # d^{-1} is scale invariant, so its boundary value is the value at xi
            value = extended_d_inverse(g, boundary, e, j)
            assert value == pytest.approx(d_inverse_entry(g, xi_point, e, j), rel=1e-10, abs=1e-12)
            assert abs(value) <= 2.0
    assert extended_m_inverse(g, boundary, 1, 1) == pytest.approx(0.0, abs=1e-14)


def test_extended_functions_at_inner_corner():
    g = triangle()
    rng = np.random.default_rng(19)
    corner = random_chart(NESTED, rng, zero_levels=(1,))
    near = CornerChart(NESTED, (corner.rho[0], 1e-7), corner.xi, {})
    t = chart_to_interior(near)
    for e in range(3):
        for j in (1, 2):
            assert extended_d_inverse(g, corner, e, j) == pytest.approx(d_inverse_entry(g, t, e, j), abs=1e-5)
    assert extended_m_inverse(g, corner, 1, 2) == pytest.approx(laplacian_inverse_entry(g, t, 1, 2), abs=1e-5)


@pytest.mark.slow
def test_extended_d_inverse_bounded_on_random_boundary_points():
    rng = np.random.default_rng(23)
    for g in (banana(), triangle(), theta(), square()):
        flags = [f for f in flags_of(g.edge_count) if f.depth]
        largest = 0.0
        for _ in range(1000):
            flag = flags[rng.integers(len(flags))]
            zero = rng.choice(flag.depth, size=int(rng.integers(1, flag.depth + 1)), replace=False)
            chart = random_chart(flag, rng, zero_levels=tuple(int(k) for k in zero))
            assert not chart.is_interior
            for e in range(g.edge_count):
                for j in range(1, g.vertex_count):
                    largest = max(largest, abs(extended_d_inverse(g, chart, e, j)))
        assert largest <= 2.0 + 1e-12


def test_gauss_legendre_exact_for_cubics():
    x, w = gauss_legendre(4, 0.0, 2.0)
    assert np.sum(w * x ** 3) == pytest.approx(4.0)


def test_pyramid_rule():
    points, weights = pyramid_rule(2, 0.0, 1.0, 12)
    assert np.sum(weights) == pytest.approx(1.0)
    assert np.sum(weights * points[:, 0] * points[:, 1]) == pytest.approx(0.25)
    # t0 t1 / |t|^3 is singular at the corner but smooth on every pyramid
    corner = points[:, 0] * points[:, 1] / np.linalg.norm(points, axis=1) ** 3
    assert np.sum(weights * corner) == pytest.approx(2.0 - np.sqrt(2.0), rel=1e-8)
    points, weights = pyramid_rule(3, 0.1, 1.0, 12)
    assert np.all(points >= 0.1 - 1e-12) and np.all(points <= 1.0 + 1e-12)
    assert np.sum(weights) == pytest.approx(0.9 ** 3, rel=1e-9)
    assert np.sum(weights * np.prod(points, axis=1)) == pytest.approx(0.495 ** 3, rel=1e-9)
    points, weights = pyramid_rule(0, 0.0, 1.0, 12)
    assert points.shape == (1, 0) and np.sum(weights) == 1.0


def test_sphere_patches():
    assert sphere_patch_area(2) == pytest.approx(np.pi / 2)
    assert sphere_patch_area(3) == pytest.approx(np.pi / 2)
    points, weights = sphere_patch_quadrature(3, nodes=12)
    assert np.sum(weights) == pytest.approx(np.pi / 2, rel=1e-10)
    np.testing.assert_allclose(np.linalg.norm(points, axis=1), 1.0)
    assert np.all(points >= 0)
    _, mc_weights = sphere_patch_quadrature(3, mc_samples=500, seed=4)
    assert np.sum(mc_weights) == pytest.approx(np.pi / 2)


def test_richardson_recovers_quadratic_limit():
    values = [1 + 2 * h + 3 * h ** 2 for h in (0.1, 0.05, 0.025, 0.0125)]
    limit, error = richardson_limit(2.0, values)
    assert complex(limit) == pytest.approx(1.0, abs=1e-12)
    assert float(error) < 1e-10


def test_integrate_form_on_domains():
    top = Form.monomial([DTT0, DTT1], TT0 * TT1)
    assert integrate_form(top, BoxDomain.cube((0, 1), 0.0, 1.0), QUADRATURE).value == pytest.approx(0.25)
    assert integrate_form(top, BoxDomain.cube((1, 0), 0.0, 1.0), QUADRATURE).value == pytest.approx(-0.25)
    euler = Form.one_form(DTT1, TT0) + Form.one_form(DTT0, -TT1)
    assert integrate_form(euler, SphereDomain((0, 1)), QUADRATURE).value == pytest.approx(np.pi / 2)
    face = FaceDomain(0, 1.0, 1, BoxDomain.cube((1,), 0.0, 1.0))
    assert integrate_form(euler, face, QUADRATURE).value == pytest.approx(1.0)
    with pytest.raises(FormError):
        integrate_form(top, SphereDomain((0, 1)), QUADRATURE)


def test_integral_result_records():
    result = IntegralResult(1e-9 + 0j, 1e-8, 10, 0, 0.5, label="x")
    assert result.is_zero()
    record = result.to_record(include_time=False)
    assert "wall_time" not in record
    assert record["value_re"] == 1e-9
    combined = result + IntegralResult(1.0, 0.1, 5, status="flagged")
    assert combined.status == "flagged"
    assert combined.nodes_used == 15


def test_strata_counts_and_labels():
    assert len(boundary_strata(single_edge(), 1.0)) == 2
    assert len(boundary_strata(banana(), 1.0)) == 5
    strata = boundary_strata(triangle(), 1.0)
    assert len(strata) == 10
    assert [s.kind for s in strata].count("scale") == 3
    assert strata[3].label == "origin{0,1}"
    assert strata[-1].label == "scale[2]"


def test_stokes_single_edge():
    omega = Form.scalar(sp.exp(-TT0) * (1 + TT0 ** 2))
    total, parts = boundary_sum(boundary_strata(single_edge(), 1.0), form_flux(omega, 1), QUADRATURE)
    interior = integrate_form(exterior_derivative(omega, ("tt",)), BoxDomain.cube((0,), 0.0, 1.0), QUADRATURE)
    assert len(parts) == 2
    assert total.value == pytest.approx(2 * np.exp(-1) - 1, abs=1e-5)
    assert interior.value == pytest.approx(2 * np.exp(-1) - 1, rel=1e-10)


def test_stokes_banana_smooth_form():
    omega = form_from_flux([(1 + TT0 ** 2) * (1 + TT1), sp.exp(-TT0 * TT1)], 2)
    total, _ = boundary_sum(boundary_strata(banana(), 1.0), form_flux(omega, 2), QUADRATURE)
    box = BoxDomain.cube((0, 1), 0.0, 1.0)
    interior = integrate_form(exterior_derivative(omega, ("tt",)), box, QUADRATURE)
    assert interior.value == pytest.approx(1.5 - np.exp(-1), rel=1e-10)
    assert total.value == pytest.approx(interior.value, abs=1e-5)


def test_sign_table_fit_on_banana():
    fit = fit_sign_table(banana(), 1.0, stokes_basket(2), QUADRATURE)
    assert fit.agrees
    assert fit.fitted["origin{0,1}"] == -1
    assert fit.residual <= 1e-6


def main():
    from runner import run_module
    return run_module("FEYNLAB SCHWINGER SPACE TEST SUITE", globals())


if __name__ == "__main__":
    main()

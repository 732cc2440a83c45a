#!/usr/bin/env python3
"""
FeynLab Exterior Algebra Test Suite
"""

import os
import sys

import numpy as np
import pytest
import sympy as sp

sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'src'))

from forms.exterior import (Form, Generator, contract, coordinate, evaluate,  # noqa: E402
                            exterior_derivative, generator_of, is_zero_form, lie_derivative_fd,
                            pullback, top_component, wedge)
from utils.errors import FormError  # noqa: E402

DZ = Generator.of("z", 1)
DZBAR = Generator.of("zbar", 1)
DX = Generator.of("x", 1)
DT = Generator.of("t", 0)
Z, ZBAR, X, T = (coordinate("z", 1), coordinate("zbar", 1), coordinate("x", 1), coordinate("t", 0))


def test_generator_order_and_lookup():
    assert DZ < DZBAR < DX < DT
    assert generator_of(X) == DX
    assert generator_of(sp.Symbol("sigma")) is None
    with pytest.raises(FormError):
        Generator.of("w", 1)


def test_wedge_is_graded_commutative():
    a = Form.one_form(DZ, Z)
    b = Form.one_form(DX, X ** 2)
    assert wedge(a, b) == -wedge(b, a)
    assert (a ^ a).is_empty()
    assert top_component(a ^ b, [DX, DZ]) == -Z * X ** 2


def test_d_squared_vanishes():
    f = Form.scalar(Z * ZBAR * X ** 3 * sp.exp(-T * X ** 2))
    once = exterior_derivative(f)
    assert not once.is_empty()
    assert exterior_derivative(once).is_empty()


def test_leibniz_rule():
    a = Form.one_form(DX, Z * X)
    b = Form.one_form(DZBAR, X * T) + Form.scalar(ZBAR)
    left = exterior_derivative(a ^ b)
    right = (exterior_derivative(a) ^ b) - (a ^ exterior_derivative(b))
    assert left == right


def test_restricted_derivative():
    f = Form.scalar(Z * ZBAR * X)
    dbar = exterior_derivative(f, ("zbar",))
    assert dbar.generators() == frozenset({DZBAR})
    assert top_component(dbar, [DZBAR]) == Z * X


def test_contraction_signs():
    form = Form.monomial([DZ, DX], 3)
    assert contract(form, {DZ: 1}) == Form.one_form(DX, 3)
    assert contract(form, {DX: 1}) == Form.one_form(DZ, -3)


def test_pullback_substitutes_coefficients_and_generators():
    u = coordinate("u", 1)
    form = Form.one_form(DX, X ** 2)
    pulled = pullback(form, {X: u ** 2})
    assert pulled == Form.one_form(Generator.of("u", 1), 2 * u ** 5)


def test_pullback_requires_every_coordinate():
    form = Form.one_form(DX, Z)
    with pytest.raises(FormError):
        pullback(form, {X: X})


def test_ambient_mismatch():
    a = Form.scalar(1, ambient=frozenset({DX}))
    b = Form.scalar(1, ambient=frozenset({DZ}))
    with pytest.raises(FormError):
        a + b
    with pytest.raises(FormError):
        Form.one_form(DT, ambient=frozenset({DX}))


def _random_form(rng, degree_cap=2):
    pool = [DZ, DZBAR, DX, DT]
    variables = [Z, ZBAR, X, T]
    form = Form.zero()
    for _ in range(int(rng.integers(1, 4))):
        size = int(rng.integers(0, degree_cap + 1))
        gens = [pool[i] for i in rng.choice(len(pool), size=size, replace=False)]
        coeff = sum(int(rng.integers(-3, 4)) * variables[i] ** int(rng.integers(0, 3))
                    for i in rng.choice(len(variables), size=2, replace=False))
        form = form + Form.monomial(gens, coeff)
    return form


def test_wedge_is_associative_on_random_forms():
    rng = np.random.default_rng(31)
    for _ in range(20):
        a, b, c = (_random_form(rng) for _ in range(3))
        assert is_zero_form(((a ^ b) ^ c) - (a ^ (b ^ c)))


def test_pullback_commutes_with_wedge_and_d():
    u, v = coordinate("u", 1), coordinate("v", 1)
    phi = {Z: u + u * v, ZBAR: u - v, X: u ** 2, T: 1 + v ** 2}
    rng = np.random.default_rng(37)
    for _ in range(10):
        a, b = _random_form(rng), _random_form(rng)
        assert is_zero_form(pullback(a ^ b, phi) - (pullback(a, phi) ^ pullback(b, phi)))
        assert is_zero_form(pullback(exterior_derivative(a), phi) - exterior_derivative(pullback(a, phi)))


def test_randomized_zero_test():
    assert is_zero_form(Form.scalar((X + 1) ** 2 - X ** 2 - 2 * X - 1))
    assert not is_zero_form(Form.scalar(X ** 2 + 1))


def test_evaluate_and_degrees():
    form = Form.scalar(2) + Form.one_form(DX, X) + Form.monomial([DZ, DZBAR], Z)
    assert form.degrees() == frozenset({0, 1, 2})
    values = evaluate(form.homogeneous(1), {X: 0.5})
    assert values == {(DX,): pytest.approx(0.5)}
    assert form.restrict_kinds(("z", "zbar")).degrees() == frozenset({0, 2})


def test_lie_derivative_matches_cartan_formula():
    form = Form.one_form(DX, X ** 2 * T) + Form.monomial([DX, DT], X)
    field = {DX: X}
    cartan = exterior_derivative(contract(form, field)) + contract(exterior_derivative(form), field)
    point = {X: 0.7, T: 1.3}
    numeric = lie_derivative_fd(form, field, point)
    exact = evaluate(cartan, point)
    for key in set(numeric) | set(exact):
        assert numeric.get(key, 0) == pytest.approx(exact.get(key, 0), abs=1e-6)


def main():
    from runner import run_module
    return run_module("FEYNLAB EXTERIOR ALGEBRA TEST SUITE", globals())


if __name__ == "__main__":
    main()

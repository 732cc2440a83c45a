#!/usr/bin/env python3
"""
FeynLab Wick Test Suite
Gaussian moments, the Gauss-Hermite oracle and position integration
"""

import os
import sys

import numpy as np
import pytest
import sympy as sp

sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'src'))

from forms.exterior import Form, Generator, coordinate, evaluate  # noqa: E402
from utils.errors import GaussianError, NonGaussianError  # noqa: E402
from wick.gaussian import (GaussianSpec, LinearFactor, factors_moment, gaussian_moment,  # noqa: E402
                           gaussian_normalization, hafnian, perfect_matchings)
from wick.oracle import gaussian_moment_oracle  # noqa: E402
from wick.positions import integrate_positions  # noqa: E402

W, WBAR = coordinate("z", 1), coordinate("zbar", 1)
W2, WBAR2 = coordinate("z", 2), coordinate("zbar", 2)
Q = coordinate("x", 1)


def test_perfect_matching_counts():
    assert [len(perfect_matchings(n)) for n in (0, 2, 4, 6)] == [1, 1, 3, 15]
    assert len(perfect_matchings(3)) == 0


def test_hafnian_numeric_and_symbolic():
    assert hafnian(np.ones((4, 4))) == pytest.approx(3.0)
    a, b, c = sp.symbols("a b c")
    K = sp.ImmutableMatrix([[0, a, b, c], [a, 0, c, b], [b, c, 0, a], [c, b, a, 0]])
    assert sp.expand(hafnian(K) - (a ** 2 + b ** 2 + c ** 2)) == 0


def test_one_dimensional_complex_moment():
    spec = GaussianSpec(((W, WBAR),), [[2.0]])
    assert spec.normalization() == pytest.approx(np.pi / 2)
    assert gaussian_moment(spec, {W: 1, WBAR: 1}) == pytest.approx(np.pi / 4)
    assert gaussian_moment(spec, {W: 2}) == 0


def test_normalized_real_moments():
    spec = GaussianSpec(real_vars=(Q,), B=[[1.0]], normalized=True)
    assert gaussian_moment(spec, {Q: 4}) == pytest.approx(3.0)
    assert gaussian_moment(spec, {Q: 3}) == 0


def test_symbolic_moment():
    t = coordinate("t", 0)
    spec = GaussianSpec(((W, WBAR),), sp.ImmutableMatrix([[t]]))
    assert not spec.is_numeric
    assert sp.simplify(gaussian_moment(spec, {W: 1, WBAR: 1}) - sp.pi / t ** 2) == 0


def test_factors_moment_matches_monomial():
    # E[(w + q)(wbar + q)] = E[w wbar] + E[q q]
    a_inv, b_inv = np.array([[0.5]]), np.array([[0.25]])
    f1 = LinearFactor(np.array([1.0]), np.array([0.0]), np.array([1.0]))
    f2 = LinearFactor(np.array([0.0]), np.array([1.0]), np.array([1.0]))
    assert factors_moment([f1, f2], a_inv, b_inv) == pytest.approx(0.75)
    assert factors_moment([f1], a_inv, b_inv) == 0


def test_oracle_agrees_with_wick_mixed():
    spec = GaussianSpec(((W, WBAR),), [[1.5]], (Q,), [[2.0]])
    monomial = {W: 2, WBAR: 2, Q: 2}
    assert gaussian_moment_oracle(spec, monomial) == pytest.approx(gaussian_moment(spec, monomial), rel=1e-9)


def test_oracle_agrees_with_wick_hermitian():
    A = np.array([[2.0, 0.5 + 0.5j], [0.5 - 0.5j, 1.5]])
    spec = GaussianSpec(((W, WBAR), (W2, WBAR2)), A)
    for monomial in ({W: 1, WBAR2: 1}, {W2: 1, WBAR: 1}, {W: 1, W2: 1, WBAR: 1, WBAR2: 1}):
        assert gaussian_moment_oracle(spec, monomial) == pytest.approx(gaussian_moment(spec, monomial),
                                                                       rel=1e-9, abs=1e-12)


def _random_spec(rng):
    n_c = int(rng.integers(0, 3))
    n_r = int(rng.integers(0 if n_c else 1, 4 - 2 * n_c + 1))
    pairs = tuple((coordinate("z", i), coordinate("zbar", i)) for i in range(1, n_c + 1))
    reals = tuple(coordinate("x", i) for i in range(1, n_r + 1))
    m = rng.normal(size=(n_c, n_c)) + 1j * rng.normal(size=(n_c, n_c))
    n = rng.normal(size=(n_r, n_r))
    A = m @ m.conj().T + np.eye(n_c)
    B = n @ n.T + np.eye(n_r)
    return GaussianSpec(pairs, A, reals, B, normalized=bool(rng.integers(2)))


def _random_monomial(rng, spec, degree=6):
    variables = [v for pair in spec.complex_pairs for v in pair] + list(spec.real_vars)
    monomial = {}
    for _ in range(int(rng.integers(0, degree + 1))):
        var = variables[rng.integers(len(variables))]
        monomial[var] = monomial.get(var, 0) + 1
    return monomial


def test_oracle_agrees_with_wick_on_random_specs():
    rng = np.random.default_rng(41)
    for _ in range(200):
        spec = _random_spec(rng)
        monomial = _random_monomial(rng, spec)
        exact = complex(gaussian_moment(spec, monomial))
        brute = gaussian_moment_oracle(spec, monomial)
        assert abs(brute - exact) <= 1e-8 * max(abs(exact), 1.0), (spec, monomial)


def test_moment_scaling_under_complex_form():
    # degree (k, k) with n_c pairs scales as lambda^{-k-n_c}
    A = np.array([[2.0, 0.5 + 0.5j], [0.5 - 0.5j, 1.5]])
    monomial = {W: 1, W2: 1, WBAR: 1, WBAR2: 1}
    base = gaussian_moment(GaussianSpec(((W, WBAR), (W2, WBAR2)), A, (Q,), [[1.0]]), monomial)
    assert abs(base) > 0
    for lam in (0.5, 2.0, 3.0):
        scaled = gaussian_moment(GaussianSpec(((W, WBAR), (W2, WBAR2)), lam * A, (Q,), [[1.0]]), monomial)
        assert complex(scaled) == pytest.approx(complex(base) * lam ** (-2 - 2), rel=1e-10)


def test_gaussian_rejects_bad_forms():
    with pytest.raises(GaussianError):
        GaussianSpec(((W, WBAR), (W2, WBAR2)), [[1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(GaussianError):
        GaussianSpec(real_vars=(Q,), B=[[-1.0]])
    with pytest.raises(GaussianError):
        gaussian_moment(GaussianSpec(real_vars=(Q,), B=[[1.0]]), {Q: 14})


def test_normalization_formula():
    A, B = np.array([[2.0]]), np.array([[4.0]])
    assert gaussian_normalization(A, B) == pytest.approx(np.pi / 2 * np.sqrt(2 * np.pi) / 2)


def test_integrate_positions():
    spec = GaussianSpec(((W, WBAR),), [[2.0]])
    integrand = Form.monomial([Generator.of("z", 1), Generator.of("zbar", 1)], W * WBAR * sp.exp(-2 * W * WBAR))
    result = evaluate(integrate_positions(integrand, spec), {})
    # orientation dz dzbar = -2i da db
    assert result[()] == pytest.approx(-2j * np.pi / 4)


def test_integrate_positions_rejects_wrong_exponent():
    spec = GaussianSpec(((W, WBAR),), [[2.0]])
    integrand = Form.monomial([Generator.of("z", 1), Generator.of("zbar", 1)], sp.exp(-3 * W * WBAR))
    with pytest.raises(NonGaussianError):
        integrate_positions(integrand, spec)


def main():
    from runner import run_module
    return run_module("FEYNLAB WICK TEST SUITE", globals())


if __name__ == "__main__":
    main()

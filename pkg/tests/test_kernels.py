#!/usr/bin/env python3
"""
FeynLab Kernel Test Suite
Heat kernel, Schwinger-space propagator and Bochner-Martinelli kernel
"""

import os
import sys

import numpy as np
import pytest

sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'src'))

from forms.exterior import is_zero_form  # noqa: E402
from graphs.decorated_graph import Signature  # noqa: E402
from kernels.bochner_martinelli import (bochner_martinelli, bochner_martinelli_components,  # noqa: E402
                                        green_pairing, regularized_propagator_components)
from kernels.heat import (SpacetimePoint, heat_kernel_mass, heat_kernel_value,  # noqa: E402
                          heat_semigroup_defect, spacetime_orientation_factor)
from kernels.propagator import euler_contraction, schwinger_propagator, total_differential  # noqa: E402
from utils.errors import KernelError  # noqa: E402

SIGNATURES = [Signature(1, 0), Signature(0, 1), Signature(1, 1), Signature(0, 2), Signature(2, 0)]


def test_heat_kernel_has_unit_mass():
    for sig in SIGNATURES:
        for t in (0.1, 1.0, 5.0):
            assert heat_kernel_mass(sig, t) == pytest.approx(1.0, rel=1e-10), (sig, t)


def test_heat_kernel_rejects_nonpositive_time():
    with pytest.raises(KernelError):
        heat_kernel_value(Signature(1, 1), 0.0, SpacetimePoint((0.1,), (0.2,)))


def test_heat_semigroup():
    p = SpacetimePoint((0.3 - 0.2j,), (0.5,))
    assert heat_semigroup_defect(Signature(1, 1), 0.3, 0.7, p) < 1e-10


def test_orientation_factor():
    assert spacetime_orientation_factor(1) == -2j
    assert spacetime_orientation_factor(2) == pytest.approx(4.0)


def test_propagator_is_closed():
    for sig in (Signature(1, 0), Signature(0, 1), Signature(1, 1)):
        assert is_zero_form(total_differential(schwinger_propagator(sig))), sig


def test_euler_field_annihilates_propagator():
    for sig in (Signature(1, 0), Signature(0, 1), Signature(1, 1)):
        assert is_zero_form(euler_contraction(sig)), sig
    # weight 1 on the real directions only works without them
    assert is_zero_form(euler_contraction(Signature(1, 0), displayed=True))
    assert not is_zero_form(euler_contraction(Signature(0, 1), displayed=True))


def test_bochner_martinelli_value():
    b = bochner_martinelli_components(Signature(1, 0), SpacetimePoint((1.0,), ()))
    assert b[0] == pytest.approx(1 / np.pi)
    form = bochner_martinelli(Signature(1, 1), SpacetimePoint((0.5,), (0.5,)))
    assert form.degrees() == frozenset({1})


def test_bochner_martinelli_errors():
    with pytest.raises(KernelError):
        bochner_martinelli_components(Signature(1, 0), SpacetimePoint((0.0,), ()))
    with pytest.raises(KernelError):
        bochner_martinelli_components(Signature(1, 0), SpacetimePoint((1.0,), ()), normalization="unit")
    with pytest.raises(KernelError):
        bochner_martinelli_components(Signature(1, 1), SpacetimePoint((1.0,), ()))


def test_regularized_propagator_limits_to_bochner_martinelli():
    sig = Signature(1, 1)
    p = SpacetimePoint((0.2 + 0.1j,), (0.15,))
    limit = bochner_martinelli_components(sig, p)
    regularized = regularized_propagator_components(sig, 1e-10, 1e8, p, method="gamma")
    assert np.max(np.abs(regularized - limit)) / np.max(np.abs(limit)) < 1e-6


def test_time_integration_methods_agree():
    sig = Signature(1, 1)
    p = SpacetimePoint((0.4 - 0.3j,), (0.25,))
    quad = regularized_propagator_components(sig, 0.01, 10.0, p, method="quad")
    gamma = regularized_propagator_components(sig, 0.01, 10.0, p, method="gamma")
    np.testing.assert_allclose(quad, gamma, rtol=1e-8)


def test_regularized_propagator_edge_cases():
    sig = Signature(1, 0)
    p = SpacetimePoint((0.5,), ())
    assert np.all(regularized_propagator_components(sig, 1.0, 1.0, p) == 0)
    with pytest.raises(KernelError):
        regularized_propagator_components(sig, 0.0, 1.0, p)
    with pytest.raises(KernelError):
        regularized_propagator_components(sig, 2.0, 1.0, p)
    with pytest.raises(KernelError):
        regularized_propagator_components(sig, 0.1, 1.0, p, method="simpson")


def test_green_pairing_low_dimension():
    assert green_pairing(Signature(1, 0)) == pytest.approx(1.0, abs=1e-6)
    assert green_pairing(Signature(0, 1)) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(KernelError):
        green_pairing(Signature(2, 0))


@pytest.mark.slow
def test_green_pairing_mixed_signature():
    assert green_pairing(Signature(1, 1)) == pytest.approx(1.0, abs=1e-5)


def main():
    from runner import run_module
    return run_module("FEYNLAB KERNEL TEST SUITE", globals())


if __name__ == "__main__":
    main()

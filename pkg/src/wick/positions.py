"""Fibre integration over vertex positions of (polynomial x Gaussian) forms."""
from typing import Dict, List, Tuple

import sympy as sp

from .gaussian import GaussianSpec, gaussian_moment

try:
    from ..forms.exterior import Form, Generator, generator_of
    from ..kernels.heat import spacetime_orientation_factor
    from ..utils.errors import GaussianError, NonGaussianError
    from ..utils.logger import logger
except ImportError:
    from forms.exterior import Form, Generator, generator_of
    from kernels.heat import spacetime_orientation_factor
    from utils.errors import GaussianError, NonGaussianError
    from utils.logger import logger


def position_generators(spec: GaussianSpec) -> Tuple[Generator, ...]:
    """The top position generators of the Gaussian's variables, canonical order."""
    gens: List[Generator] = []
    for pair in spec.complex_pairs:
        for symbol in pair:
            gen = generator_of(symbol)
            if gen is None:
                raise GaussianError(f"{symbol} is not a coordinate symbol")
            gens.append(gen)
    for symbol in spec.real_vars:
        gen = generator_of(symbol)
        if gen is None:
            raise GaussianError(f"{symbol} is not a coordinate symbol")
        gens.append(gen)
    return tuple(sorted(gens))


def _split_exponential(term: sp.Expr) -> Tuple[sp.Expr, sp.Expr]:
    """term = prefactor * exp(exponent)"""
    exponent = sp.Integer(0)
    prefactor = sp.Integer(1)
    for factor in sp.Mul.make_args(term):
        if isinstance(factor, sp.exp):
            exponent += factor.args[0]
        elif factor.is_Pow and isinstance(factor.base, sp.exp):
            exponent += factor.base.args[0] * factor.exp
        else:
            prefactor *= factor
    return prefactor, exponent


def _matches(residual: sp.Expr, variables, numeric: bool) -> bool:
    if not residual.free_symbols & set(variables):
        return True
    if numeric:
        try:
            poly = sp.Poly(residual, *variables)
        except sp.PolynomialError:
            return False
        return all(abs(complex(c)) < 1e-10 for c in poly.coeffs() if not c.free_symbols)
    return sp.simplify(residual).free_symbols.isdisjoint(variables)


def _coefficient_integral(coeff: sp.Expr, spec: GaussianSpec, variables, target_exponent) -> sp.Expr:
    total = sp.Integer(0)
    for term in sp.Add.make_args(sp.expand(coeff)):
        prefactor, exponent = _split_exponential(term)
        residual = sp.expand(exponent - target_exponent)
        if not _matches(residual, variables, spec.is_numeric):
            raise NonGaussianError("integrand exponent does not match the declared Gaussian", term)
        position_free = residual.as_independent(*variables)[0]
        try:
            poly = sp.Poly(prefactor, *variables)
        except sp.PolynomialError as e:
            raise NonGaussianError("integrand prefactor is not polynomial in positions", term) from e
        for powers, c in poly.terms():
            monomial = {v: p for v, p in zip(variables, powers) if p}
            moment = gaussian_moment(spec, monomial)
            total += c * sp.sympify(moment) * sp.exp(position_free)
    return total


def integrate_positions(integrand: Form, spec: GaussianSpec) -> Form:
    """Integrate out every position of the Gaussian; position generators sit on the left.

    Terms that do not carry the full set of position generators die.
    """
    top = position_generators(spec)
    top_set = set(top)
    variables = [s for pair in spec.complex_pairs for s in pair] + list(spec.real_vars)
    target = spec.exponent()
    orientation = sp.sympify(spacetime_orientation_factor(len(spec.complex_pairs)))

    result: Dict[Tuple[Generator, ...], sp.Expr] = {}
    dropped = 0
    for key, coeff in integrand.terms.items():
        positions = tuple(g for g in key if g.is_position)
        if set(positions) != top_set:
            dropped += 1
            continue
        rest = key[len(positions):]
        value = _coefficient_integral(coeff, spec, variables, target)
        result[rest] = result.get(rest, sp.Integer(0)) + orientation * value
    if dropped:
        logger.debug(f"integrate_positions dropped {dropped} terms below top position degree")
    return Form(result)

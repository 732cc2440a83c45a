"""Exterior algebra over named odd generators with sympy coefficients.

Every generator dg is attached to a coordinate symbol g; the exterior
derivative differentiates coefficients with respect to those symbols. The
global generator order puts position kinds before Schwinger and chart
kinds, so signs are reproducible across runs.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, FrozenSet, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import sympy as sp

try:
    from ..utils.errors import FormError
except ImportError:
    from utils.errors import FormError

KIND_ORDER = ("z", "zbar", "x", "u", "v", "t", "tt", "rho", "xi")
KIND_RANK = {kind: rank for rank, kind in enumerate(KIND_ORDER)}
POSITION_KINDS = frozenset({"z", "zbar", "x"})
SCHWINGER_KINDS = frozenset({"t", "tt", "rho", "xi"})
REAL_KINDS = frozenset({"x", "v"})
POSITIVE_KINDS = frozenset({"t", "tt", "rho", "xi"})
ALL_KINDS = frozenset(KIND_ORDER)

Scalar = Union[sp.Expr, int, float, complex]


@dataclass(frozen=True, order=True)
class Generator:
    rank: int
    index: Tuple[int, ...]

    @classmethod
    def of(cls, kind: str, *index: int) -> "Generator":
        if kind not in KIND_RANK:
            raise FormError(f"unknown generator kind '{kind}'")
        return cls(KIND_RANK[kind], tuple(int(i) for i in index))

    @property
    def kind(self) -> str:
        return KIND_ORDER[self.rank]

    @property
    def symbol(self) -> sp.Symbol:
        return coordinate(self.kind, *self.index)

    @property
    def is_position(self) -> bool:
        return self.kind in POSITION_KINDS

    def __repr__(self):
        return f"d{self.symbol.name}"


@lru_cache(maxsize=None)
def coordinate(kind: str, *index: int) -> sp.Symbol:
    """The coordinate symbol behind generator d<kind>_<index...>."""
    if kind not in KIND_RANK:
        raise FormError(f"unknown coordinate kind '{kind}'")
    name = "_".join([kind] + [str(i) for i in index])
    if kind in POSITIVE_KINDS:
        return sp.Symbol(name, positive=True)
    if kind in REAL_KINDS:
        return sp.Symbol(name, real=True)
    return sp.Symbol(name)


def generator_of(symbol: sp.Symbol) -> Optional[Generator]:
    """Inverse of coordinate(); None for symbols that are not coordinates."""
    parts = symbol.name.split("_")
    if parts[0] not in KIND_RANK:
        return None
    try:
        index = tuple(int(p) for p in parts[1:])
    except ValueError:
        return None
    if coordinate(parts[0], *index) != symbol:
        return None
    return Generator.of(parts[0], *index)


def _canonical(gens: Sequence[Generator]) -> Tuple[int, Tuple[Generator, ...]]:
    """Sort generators, returning (sign, sorted tuple); sign 0 on a repeat."""
    items = list(gens)
    if len(set(items)) < len(items):
        return 0, ()
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(items)


def _is_zero(expr: sp.Expr) -> bool:
    return expr == 0 or expr.is_zero is True


class Form:
    """Sparse map from sorted generator tuples to sympy coefficients."""

    __slots__ = ("terms", "ambient")

    def __init__(self, terms: Optional[Mapping[Tuple[Generator, ...], Scalar]] = None,
                 ambient: Optional[FrozenSet[Generator]] = None):
        collected: Dict[Tuple[Generator, ...], sp.Expr] = {}
        for gens, coeff in (terms or {}).items():
            sign, key = _canonical(gens)
            if sign == 0:
                continue
            value = collected.get(key, sp.Integer(0)) + sign * sp.sympify(coeff)
            collected[key] = value
        self.terms = {k: v for k, v in collected.items() if not _is_zero(v)}
        self.ambient = ambient
        if ambient is not None:
            stray = {g for key in self.terms for g in key} - set(ambient)
            if stray:
                raise FormError(f"generators {sorted(stray)} are outside the ambient algebra")

    # construction helpers

    @classmethod
    def scalar(cls, value: Scalar, ambient=None) -> "Form":
        return cls({(): value}, ambient)

    @classmethod
    def one_form(cls, gen: Generator, coeff: Scalar = 1, ambient=None) -> "Form":
        return cls({(gen,): coeff}, ambient)

    @classmethod
    def monomial(cls, gens: Sequence[Generator], coeff: Scalar = 1, ambient=None) -> "Form":
        return cls({tuple(gens): coeff}, ambient)

    @classmethod
    def zero(cls, ambient=None) -> "Form":
        return cls({}, ambient)

    # algebra

    def _ambient_with(self, other: "Form"):
        if self.ambient is not None and other.ambient is not None and self.ambient != other.ambient:
            raise FormError("forms live in different exterior algebras")
        return self.ambient if self.ambient is not None else other.ambient

    def __add__(self, other: "Form") -> "Form":
        if not isinstance(other, Form):
            other = Form.scalar(other)
        ambient = self._ambient_with(other)
        terms = dict(self.terms)
        for key, coeff in other.terms.items():
            terms[key] = terms.get(key, sp.Integer(0)) + coeff
        return Form(terms, ambient)

    __radd__ = __add__

    def __neg__(self) -> "Form":
        return Form({k: -v for k, v in self.terms.items()}, self.ambient)

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __mul__(self, scalar: Scalar) -> "Form":
        if isinstance(scalar, Form):
            return wedge(self, scalar)
        factor = sp.sympify(scalar)
        return Form({k: factor * v for k, v in self.terms.items()}, self.ambient)

    __rmul__ = __mul__

    def __xor__(self, other: "Form") -> "Form":
        return wedge(self, other)

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return (self - other).is_empty()

    def __hash__(self):
        return hash(frozenset(self.terms))

    def __repr__(self):
        if not self.terms:
            return "Form(0)"
        parts = [f"({coeff})*{'^'.join(map(repr, key)) or '1'}" for key, coeff in self.terms.items()]
        return "Form(" + " + ".join(parts) + ")"

    def is_empty(self) -> bool:
        return not any(not _is_zero(sp.expand(v)) for v in self.terms.values())

    def degrees(self) -> FrozenSet[int]:
        return frozenset(len(k) for k in self.terms)

    def homogeneous(self, degree: int) -> "Form":
        return Form({k: v for k, v in self.terms.items() if len(k) == degree}, self.ambient)

    def restrict_kinds(self, kinds: Iterable[str]) -> "Form":
        """Keep only terms whose generators all have the given kinds."""
        kinds = set(kinds)
        return Form({k: v for k, v in self.terms.items() if all(g.kind in kinds for g in k)},
                    self.ambient)

    def generators(self) -> FrozenSet[Generator]:
        return frozenset(g for key in self.terms for g in key)

    def free_symbols(self) -> FrozenSet[sp.Symbol]:
        symbols = set()
        for coeff in self.terms.values():
            symbols |= coeff.free_symbols
        return frozenset(symbols)

    def map_coefficients(self, fn: Callable[[sp.Expr], sp.Expr]) -> "Form":
        return Form({k: fn(v) for k, v in self.terms.items()}, self.ambient)

    def expand(self) -> "Form":
        return self.map_coefficients(sp.expand)


def wedge(a: Form, b: Form) -> Form:
    ambient = a._ambient_with(b)
    terms: Dict[Tuple[Generator, ...], sp.Expr] = {}
    for ka, ca in a.terms.items():
        for kb, cb in b.terms.items():
            sign, key = _canonical(ka + kb)
            if sign == 0:
                continue
            terms[key] = terms.get(key, sp.Integer(0)) + sign * ca * cb
    return Form(terms, ambient)


def wedge_all(forms: Iterable[Form]) -> Form:
    result = Form.scalar(1)
    for form in forms:
        result = wedge(result, form)
    return result


def exterior_derivative(a: Form, kinds: Iterable[str] = ALL_KINDS) -> Form:
    """d restricted to the coordinates of the given kinds.

    ("zbar", "x") gives the dbar + d_deRham operator on positions, ("t",) gives d_t.
    """
    kinds = frozenset(kinds)
    terms: Dict[Tuple[Generator, ...], sp.Expr] = {}
    for key, coeff in a.terms.items():
        for symbol in sorted(coeff.free_symbols, key=lambda s: s.name):
            gen = generator_of(symbol)
            if gen is None or gen.kind not in kinds:
                continue
            sign, new_key = _canonical((gen,) + key)
            if sign == 0:
                continue
            terms[new_key] = terms.get(new_key, sp.Integer(0)) + sign * sp.diff(coeff, symbol)
    return Form(terms, a.ambient)


def contract(a: Form, field: Mapping[Generator, Scalar]) -> Form:
    """Interior product with the vector field sum_g field[g] d/dg."""
    terms: Dict[Tuple[Generator, ...], sp.Expr] = {}
    for key, coeff in a.terms.items():
        for position, gen in enumerate(key):
            component = field.get(gen)
            if component is None:
                continue
            rest = key[:position] + key[position + 1:]
            sign = -1 if position % 2 else 1
            terms[rest] = terms.get(rest, sp.Integer(0)) + sign * sp.sympify(component) * coeff
    return Form(terms, a.ambient)


def pullback(a: Form, substitution: Mapping[sp.Symbol, Scalar], ambient=None) -> Form:
    """Pull back along the map given by coordinate -> expression.

    Every coordinate occurring in `a` (in a coefficient or as a generator)
    must be substituted; generators map to the full d of their images.
    """
    substitution = {k: sp.sympify(v) for k, v in substitution.items()}
    needed = set(a.free_symbols()) | {g.symbol for g in a.generators()}
    missing = sorted((s for s in needed if generator_of(s) is not None and s not in substitution),
                     key=lambda s: s.name)
    if missing:
        raise FormError(f"pullback is missing a substitution for {missing[0].name}")
    differentials: Dict[Generator, Form] = {}
    result = Form.zero(ambient)
    for key, coeff in a.terms.items():
        piece = Form.scalar(coeff.xreplace(substitution), ambient)
        for gen in key:
            if gen not in differentials:
                differentials[gen] = exterior_derivative(Form.scalar(substitution[gen.symbol], ambient))
            piece = wedge(piece, differentials[gen])
        result = result + piece
    return result


def identity_substitution(symbols: Iterable[sp.Symbol]) -> Dict[sp.Symbol, sp.Expr]:
    return {s: s for s in symbols}


def top_component(a: Form, generators: Sequence[Generator]) -> sp.Expr:
    """Coefficient of the wedge of `generators` in the requested order."""
    sign, key = _canonical(generators)
    if sign == 0:
        return sp.Integer(0)
    return sign * a.terms.get(key, sp.Integer(0))


def evaluate(a: Form, values: Mapping[sp.Symbol, Scalar]) -> Dict[Tuple[Generator, ...], complex]:
    """Numeric coefficients at a point."""
    result = {}
    for key, coeff in a.terms.items():
        value = complex(sp.N(coeff.xreplace({k: sp.sympify(v) for k, v in values.items()})))
        result[key] = value
    return result


def lambdify_coefficients(a: Form, symbols: Sequence[sp.Symbol]):
    """numpy callables per term, all taking the same positional symbols."""
    return {key: sp.lambdify(tuple(symbols), coeff, modules="numpy") for key, coeff in a.terms.items()}


def _sample_point(symbols: Iterable[sp.Symbol], rng: np.random.Generator) -> Dict[sp.Symbol, complex]:
    point = {}
    for s in symbols:
        if s.is_positive:
            point[s] = rng.uniform(0.5, 2.0)
        elif s.is_real:
            point[s] = rng.normal()
        else:
            point[s] = complex(rng.normal(), rng.normal())
    return point


def sampled_max_abs(a: Form, samples: int = 20, seed: int = 0) -> float:
    """Largest |coefficient| over `samples` random points."""
    if not a.terms:
        return 0.0
    symbols = sorted(a.free_symbols(), key=lambda s: s.name)
    functions = lambdify_coefficients(a, symbols)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        point = _sample_point(symbols, rng)
        args = [point[s] for s in symbols]
        for fn in functions.values():
            worst = max(worst, abs(complex(fn(*args))))
    return worst


def is_zero_form(a: Form, samples: int = 20, tol: float = 1e-9, seed: int = 0) -> bool:
    """Randomized zero test: every coefficient vanishes at `samples` random points."""
    return sampled_max_abs(a, samples, seed) <= tol


def max_abs_coefficient(a: Form, point: Mapping[sp.Symbol, Scalar]) -> float:
    values = evaluate(a, point)
    return max((abs(v) for v in values.values()), default=0.0)


def lie_derivative_fd(a: Form, field: Mapping[Generator, Scalar], point: Mapping[sp.Symbol, Scalar],
                      h: float = 1e-4) -> Dict[Tuple[Generator, ...], complex]:
    """Central difference of the pullback along p -> p +- h v(p) at a point."""
    symbols = set(a.free_symbols()) | {g.symbol for g in a.generators()} | {g.symbol for g in field}
    for expr in field.values():
        symbols |= sp.sympify(expr).free_symbols
    step = sp.Float(h)

    def shifted(sign):
        substitution = {s: s for s in symbols if generator_of(s) is not None}
        for gen, component in field.items():
            substitution[gen.symbol] = gen.symbol + sign * step * sp.sympify(component)
        return pullback(a, substitution)

    plus = evaluate(shifted(1), point)
    minus = evaluate(shifted(-1), point)
    keys = set(plus) | set(minus)
    return {k: (plus.get(k, 0) - minus.get(k, 0)) / (2 * h) for k in keys}

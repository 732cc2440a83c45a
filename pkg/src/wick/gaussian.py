"""Gaussian moments by Wick/Isserlis pairings.

Complex variables w_a with exponent -sum w_a A_ab wbar_b have E[w_a wbar_b] = (A^{-1})_{ba}
and E[w w] = E[wbar wbar] = 0; real variables q with exponent -1/2 q B q have
E[q_a q_b] = (B^{-1})_{ab}. A product of centred linear forms is then the
hafnian of the matrix of pair covariances.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import sympy as sp

try:
    from ..utils.errors import GaussianError
except ImportError:
    from utils.errors import GaussianError

MAX_DEGREE = 12

Monomial = Mapping[sp.Symbol, int]


@lru_cache(maxsize=None)
def perfect_matchings(n: int) -> np.ndarray:
    """All perfect matchings of n slots, shape (count, n/2, 2)."""
    if n % 2:
        return np.zeros((0, 0, 2), dtype=int)
    if n == 0:
        return np.zeros((1, 0, 2), dtype=int)

    def build(slots):
        if not slots:
            yield []
            return
        first, rest = slots[0], slots[1:]
        for i, partner in enumerate(rest):
            for tail in build(rest[:i] + rest[i + 1:]):
                yield [(first, partner)] + tail

    return np.array(list(build(tuple(range(n)))), dtype=int)


def hafnian(K) -> complex:
    """Sum over perfect matchings of products of K entries (numpy or sympy)."""
    n = K.shape[0]
    if n % 2:
        return 0
    if n > MAX_DEGREE:
        raise GaussianError(f"moment degree {n} exceeds the cap of {MAX_DEGREE}")
    matchings = perfect_matchings(n)
    if isinstance(K, np.ndarray):
        if n == 0:
            return 1.0 + 0j
        return complex(np.sum(np.prod(K[matchings[:, :, 0], matchings[:, :, 1]], axis=1)))
    total = sp.Integer(0)
    for matching in matchings:
        term = sp.Integer(1)
        for i, j in matching:
            term *= K[int(i), int(j)]
        total += term
    return total


@dataclass(frozen=True)
class LinearFactor:
    """alpha . w + beta . wbar + gamma . q"""

    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray


def pair_covariances(factors: Sequence[LinearFactor], a_inv: np.ndarray, b_inv: np.ndarray) -> np.ndarray:
    """K_ij = beta_j A^{-1} alpha_i + beta_i A^{-1} alpha_j + gamma_i B^{-1} gamma_j"""
    if not factors:
        return np.zeros((0, 0), dtype=complex)
    alpha = np.array([f.alpha for f in factors], dtype=complex)
    beta = np.array([f.beta for f in factors], dtype=complex)
    gamma = np.array([f.gamma for f in factors], dtype=complex)
    k = np.zeros((len(factors), len(factors)), dtype=complex)
    if alpha.shape[1]:
        cross = beta @ a_inv @ alpha.T  # cross[j, i] = beta_j A^{-1} alpha_i
        k += cross.T + cross
    if gamma.shape[1]:
        k += gamma @ b_inv @ gamma.T
    return k


def factors_moment(factors: Sequence[LinearFactor], a_inv: np.ndarray, b_inv: np.ndarray) -> complex:
    """Centred expectation of a product of linear factors."""
    if len(factors) % 2:
        return 0j
    return hafnian(pair_covariances(factors, a_inv, b_inv))


def gaussian_normalization(A: np.ndarray, B: np.ndarray) -> complex:
    """pi^{n_c} / det A * (2 pi)^{n_r/2} / sqrt(det B), Lebesgue measure."""
    value = 1.0 + 0j
    if A.shape[0]:
        value *= np.pi ** A.shape[0] / np.linalg.det(A)
    if B.shape[0]:
        value *= (2 * np.pi) ** (B.shape[0] / 2) / np.sqrt(np.linalg.det(B))
    return value


def _as_matrix(m) -> sp.ImmutableMatrix:
    if m is None:
        return sp.ImmutableMatrix(0, 0, [])
    if isinstance(m, sp.MatrixBase):
        return sp.ImmutableMatrix(m)
    array = np.atleast_2d(np.asarray(m))
    if array.size == 0:
        return sp.ImmutableMatrix(0, 0, [])
    return sp.ImmutableMatrix(array.tolist())


@dataclass(frozen=True, eq=False)
class GaussianSpec:
    """exp(-sum w_a A_ab wbar_b - 1/2 sum q_a B_ab q_b) over named variables.

    Numeric specs (every entry a number) evaluate with numpy; specs whose
    entries contain symbols (e.g. Schwinger times) evaluate with sympy.
    """

    complex_pairs: Tuple[Tuple[sp.Symbol, sp.Symbol], ...] = ()
    A: sp.ImmutableMatrix = field(default=None)
    real_vars: Tuple[sp.Symbol, ...] = ()
    B: sp.ImmutableMatrix = field(default=None)
    normalized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "complex_pairs", tuple(tuple(p) for p in self.complex_pairs))
        object.__setattr__(self, "real_vars", tuple(self.real_vars))
        object.__setattr__(self, "A", _as_matrix(self.A))
        object.__setattr__(self, "B", _as_matrix(self.B))
        if self.A.shape != (len(self.complex_pairs),) * 2:
            raise GaussianError(f"A has shape {self.A.shape}, expected {len(self.complex_pairs)} square")
        if self.B.shape != (len(self.real_vars),) * 2:
            raise GaussianError(f"B has shape {self.B.shape}, expected {len(self.real_vars)} square")
        if self.is_numeric:
            a, b = self.numeric_matrices()
            if a.shape[0] and abs(np.linalg.det(a)) < 1e-300:
                raise GaussianError("complex quadratic form A is singular")
            if b.shape[0]:
                if not np.allclose(b, b.T):
                    raise GaussianError("real quadratic form B is not symmetric")
                try:
                    np.linalg.cholesky(b)
                except np.linalg.LinAlgError as e:
                    raise GaussianError("real quadratic form B is not positive definite") from e
        elif self.B.shape[0] and self.B != self.B.T:
            raise GaussianError("real quadratic form B is not symmetric")

    @property
    def is_numeric(self) -> bool:
        return not (self.A.free_symbols or self.B.free_symbols)

    def numeric_matrices(self) -> Tuple[np.ndarray, np.ndarray]:
        a = np.array(self.A.tolist(), dtype=complex).reshape(self.A.shape)
        b = np.array(self.B.tolist(), dtype=float).reshape(self.B.shape)
        return a, b

    def exponent(self) -> sp.Expr:
        w = [p[0] for p in self.complex_pairs]
        wbar = [p[1] for p in self.complex_pairs]
        value = sp.Integer(0)
        for i, wi in enumerate(w):
            for j, wj in enumerate(wbar):
                value -= wi * self.A[i, j] * wj
        for i, qi in enumerate(self.real_vars):
            for j, qj in enumerate(self.real_vars):
                value -= sp.Rational(1, 2) * qi * self.B[i, j] * qj
        return value

    def normalization(self):
        if self.normalized:
            return 1
        if self.is_numeric:
            return gaussian_normalization(*self.numeric_matrices())
        value = sp.Integer(1)
        if self.A.shape[0]:
            value *= sp.pi ** self.A.shape[0] / self.A.det()
        if self.B.shape[0]:
            value *= (2 * sp.pi) ** sp.Rational(self.B.shape[0], 2) / sp.sqrt(self.B.det())
        return value

    def covariance_complex(self):
        """C[a, b] = E[w_a wbar_b] = (A^{-1})_{ba}"""
        if self.is_numeric:
            return np.linalg.inv(self.numeric_matrices()[0]).T
        return self.A.inv().T

    def covariance_real(self):
        if self.is_numeric:
            return np.linalg.inv(self.numeric_matrices()[1])
        return self.B.inv()

    def variable_slots(self) -> Dict[sp.Symbol, Tuple[str, int]]:
        slots = {}
        for a, (w, wbar) in enumerate(self.complex_pairs):
            slots[w] = ("w", a)
            slots[wbar] = ("wbar", a)
        for c, q in enumerate(self.real_vars):
            slots[q] = ("q", c)
        return slots


def gaussian_moment(spec: GaussianSpec, monomial: Monomial):
    """Integral of the monomial against the Gaussian (normalization included).

    Returns a complex number for numeric specs and a sympy expression otherwise.
    """
    slots = spec.variable_slots()
    w_slots, wbar_slots, q_slots = [], [], []
    for var, power in monomial.items():
        if power < 0:
            raise GaussianError(f"negative exponent {power} for {var}")
        if var not in slots:
            raise GaussianError(f"variable {var} is not part of the Gaussian")
        kind, index = slots[var]
        {"w": w_slots, "wbar": wbar_slots, "q": q_slots}[kind].extend([index] * power)
    degree = len(w_slots) + len(wbar_slots) + len(q_slots)
    if degree > MAX_DEGREE:
        raise GaussianError(f"moment degree {degree} exceeds the cap of {MAX_DEGREE}")
    norm = spec.normalization()
    if len(w_slots) != len(wbar_slots) or len(q_slots) % 2:
        return 0j if spec.is_numeric else sp.Integer(0)

    complex_part = _permanent_part(spec, w_slots, wbar_slots)
    real_part = hafnian(_real_block(spec, q_slots))
    return norm * complex_part * real_part


def _real_block(spec: GaussianSpec, q_slots):
    if not q_slots:
        return np.zeros((0, 0)) if spec.is_numeric else sp.ImmutableMatrix(0, 0, [])
    cov = spec.covariance_real()
    if spec.is_numeric:
        return cov[np.ix_(q_slots, q_slots)]
    return sp.ImmutableMatrix(len(q_slots), len(q_slots),
                              lambda i, j: cov[q_slots[i], q_slots[j]])


def _permanent_part(spec: GaussianSpec, w_slots, wbar_slots):
    """Sum over bijections w-slot -> wbar-slot of prod E[w_a wbar_b]."""
    n = len(w_slots)
    if n == 0:
        return 1
    cov = spec.covariance_complex()
    # permanent as the hafnian of the bipartite block matrix
    if spec.is_numeric:
        block = cov[np.ix_(w_slots, wbar_slots)]
        k = np.zeros((2 * n, 2 * n), dtype=complex)
        k[:n, n:] = block
        k[n:, :n] = block.T
        return hafnian(k)
    block = sp.zeros(2 * n, 2 * n)
    for i, a in enumerate(w_slots):
        for j, b in enumerate(wbar_slots):
            block[i, n + j] = cov[a, b]
            block[n + j, i] = cov[a, b]
    return hafnian(sp.ImmutableMatrix(block))

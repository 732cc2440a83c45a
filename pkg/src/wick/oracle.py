"""Brute-force Gaussian moments: Cholesky whitening plus tensor Gauss-Hermite."""
from typing import Optional

import numpy as np

from .gaussian import GaussianSpec, Monomial, gaussian_normalization

try:
    from ..utils.errors import GaussianError
except ImportError:
    from utils.errors import GaussianError

MAX_ORACLE_DIMENSION = 4


def _precision(spec: GaussianSpec) -> np.ndarray:
    """P with exponent -1/2 v P v in v = (Re w, Im w, q).

    For Hermitian A = S + iK, w A wbar = a S a + b S b + 2 a K b.
    """
    a, b = spec.numeric_matrices()
    n_c, n_r = a.shape[0], b.shape[0]
    if n_c and not np.allclose(a, a.conj().T):
        raise GaussianError("oracle needs a Hermitian complex form")
    s, k = a.real, a.imag
    p = np.zeros((2 * n_c + n_r, 2 * n_c + n_r))
    p[:n_c, :n_c] = 2 * s
    p[n_c:2 * n_c, n_c:2 * n_c] = 2 * s
    p[:n_c, n_c:2 * n_c] = 2 * k
    p[n_c:2 * n_c, :n_c] = -2 * k
    p[2 * n_c:, 2 * n_c:] = b
    return p


def gaussian_moment_oracle(spec: GaussianSpec, monomial: Monomial, nodes: Optional[int] = None) -> complex:
    if not spec.is_numeric:
        raise GaussianError("oracle needs a numeric Gaussian")
    n_c, n_r = len(spec.complex_pairs), len(spec.real_vars)
    dim = 2 * n_c + n_r
    if dim > MAX_ORACLE_DIMENSION:
        raise GaussianError(f"oracle supports total dimension <= {MAX_ORACLE_DIMENSION}, got {dim}")
    degree = sum(monomial.values())
    if nodes is None:
        nodes = max(degree // 2 + 2, 12)

    try:
        chol = np.linalg.cholesky(_precision(spec))
    except np.linalg.LinAlgError as e:
        raise GaussianError("Gaussian is not integrable (precision not positive definite)") from e
    # v = sqrt(2) G^{-T} y turns exp(-1/2 v P v) into exp(-|y|^2)
    transform = np.sqrt(2.0) * np.linalg.inv(chol).T
    jacobian = abs(np.linalg.det(transform))

    y, w = np.polynomial.hermite.hermgauss(nodes)
    grids = np.meshgrid(*([y] * dim), indexing="ij") if dim else []
    weights = np.ones(nodes ** dim)
    for axis in np.meshgrid(*([w] * dim), indexing="ij") if dim else []:
        weights = weights * axis.ravel()
    points = np.stack([g.ravel() for g in grids]) if dim else np.zeros((0, 1))
    v = transform @ points if dim else points

    slots = spec.variable_slots()
    values = np.ones(v.shape[1], dtype=complex)
    for var, power in monomial.items():
        if var not in slots:
            raise GaussianError(f"variable {var} is not part of the Gaussian")
        kind, index = slots[var]
        if kind == "q":
            coordinate = v[2 * n_c + index]
        elif kind == "w":
            coordinate = v[index] + 1j * v[n_c + index]
        else:
            coordinate = v[index] - 1j * v[n_c + index]
        values = values * coordinate ** power

    total = jacobian * complex(np.sum(weights * values))
    if spec.normalized:
        total /= gaussian_normalization(*spec.numeric_matrices())
    return total

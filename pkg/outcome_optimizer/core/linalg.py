"""
Dense Hermitian linear algebra for Outcome Optimizer
"""

from typing import Tuple, Union

import numpy as np

from .models import HermitianMatrix, Povm
from .validators import DEFAULT_PSD_TOL

HermitianLike = Union[HermitianMatrix, np.ndarray]


def as_hermitian(matrix: HermitianLike) -> HermitianMatrix:
    """Accept either a HermitianMatrix or a raw array; raw arrays are validated"""
    if isinstance(matrix, HermitianMatrix):
        return matrix
    return HermitianMatrix(matrix)


def eigendecompose(matrix: HermitianLike) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigendecomposition of a Hermitian operator

    Args:
        matrix: Hermitian operator (raw arrays are checked for Hermiticity)

    Returns:
        (eigenvalues sorted descending, eigenvectors as orthonormal columns in
        the same order) so that V diag(w) V^dagger reconstructs the input

    Raises:
        InvariantViolationError: If the input is not Hermitian
    """
    hermitian = as_hermitian(matrix)
    eigenvalues, eigenvectors = np.linalg.eigh(hermitian.data)
    order = np.argsort(eigenvalues)[::-1]
    return eigenvalues[order], eigenvectors[:, order]


def reconstruct(eigenvalues: np.ndarray, eigenvectors: np.ndarray) -> np.ndarray:
    return (eigenvectors * eigenvalues) @ eigenvectors.conj().T


def min_eigenvalue(matrix: HermitianLike) -> float:
    return float(np.linalg.eigvalsh(as_hermitian(matrix).data)[0])


def trace_norm(matrix: HermitianLike) -> float:
    """Sum of absolute eigenvalues"""
    eigenvalues = np.linalg.eigvalsh(as_hermitian(matrix).data)
    return float(np.sum(np.abs(eigenvalues)))


def is_psd(matrix: HermitianLike, tol: float = DEFAULT_PSD_TOL) -> bool:
    """True iff the smallest eigenvalue is >= -tol"""
    return min_eigenvalue(matrix) >= -tol


def effective_outcome_count(povm: Povm, eps: float = 1e-9) -> int:
    """
    Number of effects with trace above eps.

    This counts nonzero effects only, an upper bound on the simulability-based
    effective number computed by algorithms.robustness.effective_outcome_number.
    """
    return sum(1 for effect in povm.effects if effect.trace > eps)


def helstrom_value(state_a: HermitianLike, state_b: HermitianLike) -> float:
    """Closed-form optimal guessing probability 1/2 (tr(a + b) + ||a - b||_1) for two subnormalized states"""
    a = as_hermitian(state_a)
    b = as_hermitian(state_b)
    return 0.5 * ((a + b).trace + trace_norm(a - b))

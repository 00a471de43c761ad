"""
Validation utilities for Outcome Optimizer

Invariant checks shared by the domain models. Each validator raises
InvariantViolationError with a message naming the offending object.
"""

from typing import Sequence

import numpy as np

from .exceptions import InvariantViolationError

HERMITICITY_TOL = 1e-12
DEFAULT_PSD_TOL = 1e-9
DEFAULT_IDENTITY_TOL = 1e-9


def validate_hermitian(array, tol: float = HERMITICITY_TOL, label: str = "matrix") -> np.ndarray:
    """Coerce to a square complex array and check entries[i][j] = conj(entries[j][i])"""
    try:
        matrix = np.array(array, dtype=np.complex128)
    except (TypeError, ValueError) as e:
        raise InvariantViolationError(f"{label} is not numeric: {e}")

    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvariantViolationError(f"{label} must be square, got shape {matrix.shape}")

    if matrix.shape[0] < 1:
        raise InvariantViolationError(f"{label} must have dimension >= 1")

    if not np.all(np.isfinite(matrix)):
        raise InvariantViolationError(f"{label} has non-finite entries")

    deviation = np.max(np.abs(matrix - matrix.conj().T))
    if deviation > tol:
        raise InvariantViolationError(f"{label} is not Hermitian (max deviation {deviation:.3e})")

    return matrix


def validate_psd(matrix: np.ndarray, tol: float = DEFAULT_PSD_TOL, label: str = "matrix") -> None:
    """Check that the smallest eigenvalue is >= -tol"""
    min_eig = float(np.linalg.eigvalsh(matrix)[0])
    if min_eig < -tol:
        raise InvariantViolationError(
            f"{label} is not positive semidefinite (min eigenvalue {min_eig:.3e}, tol {tol:.1e})"
        )


def validate_same_dimension(matrices: Sequence[np.ndarray], label: str = "operators") -> int:
    """Check that all matrices share one dimension and return it"""
    if not matrices:
        raise InvariantViolationError(f"{label} must not be empty")

    dims = {m.shape[0] for m in matrices}
    if len(dims) != 1:
        raise InvariantViolationError(f"{label} have mixed dimensions: {sorted(dims)}")

    return dims.pop()


def validate_identity_sum(matrices: Sequence[np.ndarray], tol: float = DEFAULT_IDENTITY_TOL,
                          label: str = "effects") -> None:
    """Check that the matrices sum to the identity entrywise within tol"""
    dim = matrices[0].shape[0]
    deviation = np.max(np.abs(sum(matrices) - np.eye(dim)))
    if deviation > tol:
        raise InvariantViolationError(
            f"{label} do not sum to the identity (max entry deviation {deviation:.3e})"
        )


def validate_unit_trace(matrices: Sequence[np.ndarray], tol: float = DEFAULT_IDENTITY_TOL,
                        label: str = "states") -> None:
    """Check that the traces of the matrices sum to one within tol"""
    total = float(sum(np.trace(m).real for m in matrices))
    if abs(total - 1.0) > tol:
        raise InvariantViolationError(f"{label} have total trace {total:.12f}, expected 1")

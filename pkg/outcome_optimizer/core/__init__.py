"""
Core module for Outcome Optimizer
Domain types, invariant checks, Hermitian linear algebra and relabelings
"""

from .models import HermitianMatrix, Povm, Ensemble, MeasurementAssemblage, OptimizationConfig
from .linalg import eigendecompose, trace_norm, is_psd, effective_outcome_count, helstrom_value
from .relabeling import RelabelingScheme, enumerate_scheme, d_value, simulate
from .exceptions import (
    OutcomeOptimizerError,
    InvariantViolationError,
    DomainError,
    DegenerateInputError,
    ValidationError,
    SolverFailureError
)

__all__ = [
    "HermitianMatrix",
    "Povm",
    "Ensemble",
    "MeasurementAssemblage",
    "OptimizationConfig",
    "eigendecompose",
    "trace_norm",
    "is_psd",
    "effective_outcome_count",
    "helstrom_value",
    "RelabelingScheme",
    "enumerate_scheme",
    "d_value",
    "simulate",
    "OutcomeOptimizerError",
    "InvariantViolationError",
    "DomainError",
    "DegenerateInputError",
    "ValidationError",
    "SolverFailureError"
]

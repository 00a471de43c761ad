"""
Custom exceptions for Outcome Optimizer
"""

from typing import Any, Dict, Optional


class OutcomeOptimizerError(Exception):
    """Base exception for all outcome optimizer errors"""
    pass


class InvariantViolationError(OutcomeOptimizerError):
    """Raised when a domain object violates its construction invariants"""
    pass


class DomainError(OutcomeOptimizerError):
    """Raised when an operation is called outside its domain (n > m, bad indices, ...)"""
    pass


class DegenerateInputError(DomainError):
    """Raised when an input is formally valid but degenerate (zero witness, zero score)"""
    pass


class ValidationError(OutcomeOptimizerError):
    """Raised when external input (JSON, CLI arguments) is malformed"""
    pass


class SolverFailureError(OutcomeOptimizerError):
    """Raised when a conic solve fails after the automatic retry"""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}

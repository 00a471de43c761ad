"""
Conic solver layer for Outcome Optimizer
"""

from .base import SolverBackend, BackendOutcome
from .conic import (
    SdpProblem,
    SdpSolution,
    SolveStatus,
    CvxpyConicBackend,
    embed_hermitian,
    extract_hermitian,
    select_backend,
    solve
)

__all__ = [
    "SolverBackend",
    "BackendOutcome",
    "SdpProblem",
    "SdpSolution",
    "SolveStatus",
    "CvxpyConicBackend",
    "embed_hermitian",
    "extract_hermitian",
    "select_backend",
    "solve"
]

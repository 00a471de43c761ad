"""
Base solver backend class for Outcome Optimizer
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any


@dataclass
class BackendOutcome:
    """What a backend reports for one solve attempt"""
    status: str                 # cvxpy status string, or "solver_error"
    objective: float
    gap: float                  # |primal objective - dual objective| of the standard form
    iterations: int = 0
    message: str = ""


class SolverBackend(ABC):
    """Abstract base class for conic solver backends"""

    def __init__(self):
        self.name = "Base Backend"

    @abstractmethod
    def is_available(self) -> bool:
        """Whether the backend can be used in this environment"""
        pass

    @abstractmethod
    def solve(self, problem: Any, tol: float, max_iterations: int) -> BackendOutcome:
        """
        Solve a compiled problem in place

        Args:
            problem: Backend-specific compiled problem (a cvxpy.Problem for the
                cvxpy backends); variable values are populated on return
            tol: Feasibility and duality-gap tolerance
            max_iterations: Iteration cap of the underlying method

        Returns:
            BackendOutcome describing status, objective and gap
        """
        pass

    def __str__(self):
        return f"{self.name}"

"""
Outcome Optimizer - outcome-number robustness of quantum measurements

Semidefinite programs for the robustness of an m-outcome POVM against
measurements simulable with n outcomes, the state-discrimination tasks that
witness it, seesaw search for maximal advantage and certification of outcome
numbers from observed guessing probabilities.
"""

__version__ = "0.1.0"
__license__ = "MIT"
__title__ = "Outcome Optimizer"
__description__ = "Robustness and state-discrimination advantage of quantum measurements"

from .core import Ensemble, HermitianMatrix, MeasurementAssemblage, OptimizationConfig, Povm
from .algorithms import (
    advantage,
    certify_outcomes,
    effective_outcome_number,
    optimal_free_guess,
    optimal_guess,
    robustness,
    seesaw,
)

__all__ = [
    "Ensemble",
    "HermitianMatrix",
    "MeasurementAssemblage",
    "OptimizationConfig",
    "Povm",
    "advantage",
    "certify_outcomes",
    "effective_outcome_number",
    "optimal_free_guess",
    "optimal_guess",
    "robustness",
    "seesaw",
]

"""
Optimization algorithms for Outcome Optimizer
"""

from .robustness import RobustnessResult, build_primal, build_dual, robustness, effective_outcome_number
from .discrimination import (
    DiscriminationReport,
    guess_probability,
    optimal_guess,
    optimal_free_guess,
    advantage,
    certify_outcomes
)
from .advantage import SeesawTrace, seesaw, max_advantage_bound, saturating_instance, pre_measurement_info_game
from .generalized import ScoreCoefficients, WitnessFamily, score, apply_f, witness_to_ensemble, generalized_advantage

__all__ = [
    "RobustnessResult",
    "build_primal",
    "build_dual",
    "robustness",
    "effective_outcome_number",
    "DiscriminationReport",
    "guess_probability",
    "optimal_guess",
    "optimal_free_guess",
    "advantage",
    "certify_outcomes",
    "SeesawTrace",
    "seesaw",
    "max_advantage_bound",
    "saturating_instance",
    "pre_measurement_info_game",
    "ScoreCoefficients",
    "WitnessFamily",
    "score",
    "apply_f",
    "witness_to_ensemble",
    "generalized_advantage",
]

"""
Minimum-error state discrimination

Guessing probabilities, the optimal-measurement program, the optimum over
n-outcome-simulable measurements and certification of outcome numbers from an
observed guessing probability.

The simulable optimum is evaluated on the vertices of the free set: the score
is linear in the mixture p(x), so the best free measurement applies a single
combination x and discriminates the unnormalized sub-ensemble {rho~_{x_a}}
optimally with an n-outcome POVM.
"""

from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from ..core.exceptions import DomainError
from ..core.models import Ensemble, HermitianMatrix, OptimizationConfig, Povm
from ..core.relabeling import enumerate_scheme
from ..solvers.conic import SdpProblem, solve
from ..utils.logging import OptimizationLogger, get_logger, timed_operation

TIE_TOL = 1e-9
ZERO_MASS = 1e-14


def guess_probability(ensemble: Ensemble, povm: Povm) -> float:
    """
    P_guess(E, M) = sum_b tr(rho~_b M_b)

    Raises:
        DomainError: If lengths or dimensions differ
    """
    if ensemble.size != povm.outcome_count:
        raise DomainError(f"Ensemble has {ensemble.size} states but POVM has {povm.outcome_count} outcomes")
    if ensemble.dim != povm.dim:
        raise DomainError(f"Ensemble dimension {ensemble.dim} differs from POVM dimension {povm.dim}")
    return float(sum(state.inner(effect) for state, effect in zip(ensemble.states, povm.effects)))


def _discrimination_program(states: Sequence[HermitianMatrix], k: int, name: str) -> SdpProblem:
    """maximize sum_b tr(states_b M_b) over k-outcome POVMs; states beyond k are ignored"""
    d = states[0].dim
    problem = SdpProblem(name)
    effects = [problem.add_psd(f"M[{b}]", d) for b in range(k)]
    problem.maximize(sum(effect.inner(state) for effect, state in zip(effects, states)))
    problem.add_equality("completeness", sum(effect.embedded for effect in effects), problem.identity(d))
    return problem


def _solve_discrimination(states: Sequence[HermitianMatrix], k: int, name: str,
                          config: OptimizationConfig,
                          logger: Optional[OptimizationLogger]) -> Tuple[float, Povm]:
    d = states[0].dim
    if len(states) == 1 or sum(1 for s in states if s.trace > ZERO_MASS) <= 1:
        # One nonzero state: guess it always
        best = int(np.argmax([s.trace for s in states]))
        effects = [np.zeros((d, d)) for _ in range(k)]
        effects[best] = np.eye(d)
        return float(states[best].trace), Povm.from_arrays(effects)

    problem = _discrimination_program(states, k, name)
    solution = solve(problem, config=config, logger=logger).require_optimal(name)
    povm = Povm.sanitize([solution.values[f"M[{b}]"].data for b in range(k)],
                         tol=config.result_psd_tol)
    return float(solution.objective_value), povm


def optimal_guess(ensemble: Ensemble, k: int, config: Optional[OptimizationConfig] = None,
                  logger: Optional[OptimizationLogger] = None) -> Tuple[float, Povm]:
    """
    Best guessing probability over k-outcome POVMs

    For k >= |E| the program runs over k effects with the extra outcomes never
    rewarded. For k < |E| the optimum is the simulable one, optimal_free_guess(E, k),
    and the returned POVM is the best sub-measurement relabeled into |E| outcomes.

    Returns:
        (value, povm) with povm having max(k, |E|) outcomes

    Raises:
        DomainError: If k < 1
        SolverFailureError: If the program cannot be solved
    """
    if k < 1:
        raise DomainError(f"Outcome number must be >= 1, got {k}")
    config = config or OptimizationConfig()
    m = ensemble.size

    if k < m:
        free = optimal_free_guess(ensemble, k, config, logger)
        return free.value, free.best_povm

    value, povm = _solve_discrimination(list(ensemble.states), k,
                                        f"optimal_guess_m{m}_k{k}_d{ensemble.dim}", config, logger)
    return value, povm


class FreeGuessResult(NamedTuple):
    """Optimum over n-outcome-simulable measurements"""
    value: float
    best_combination: int
    per_combination_values: List[float]
    combinations: List[Tuple[int, ...]]
    best_povm: Povm
    sub_povms: List[Povm]


def _sub_ensemble_value(states: Sequence[HermitianMatrix], combination: Tuple[int, ...],
                        name: str, config: OptimizationConfig,
                        logger: Optional[OptimizationLogger]) -> Tuple[float, Optional[np.ndarray]]:
    sub = [states[b] for b in combination]
    if sum(s.trace for s in sub) <= ZERO_MASS:
        return 0.0, None
    value, povm = _solve_discrimination(sub, len(combination), name, config, logger)
    return value, np.array(povm.arrays())


def optimal_free_guess(ensemble: Ensemble, n: int, config: Optional[OptimizationConfig] = None,
                       logger: Optional[OptimizationLogger] = None) -> FreeGuessResult:
    """
    Best guessing probability over measurements simulable by n-outcome POVMs

    Every combination x is evaluated (in parallel with config.jobs workers);
    ties go to the lexicographically first combination within 1e-9.

    Raises:
        DomainError: If n < 1 or n > |E|
    """
    config = config or OptimizationConfig()
    m = ensemble.size
    if not 1 <= n <= m:
        raise DomainError(f"Need 1 <= n <= m, got n={n}, m={m}")

    scheme = enumerate_scheme(m, n)
    states = list(ensemble.states)
    worker_logger = (logger or get_logger()) if config.jobs == 1 else None

    outcomes = Parallel(n_jobs=config.jobs)(
        delayed(_sub_ensemble_value)(states, combination,
                                     f"free_guess_m{m}_n{n}_x{x}", config, worker_logger)
        for x, combination in enumerate(scheme.combinations)
    )

    values = [value for value, _ in outcomes]
    top = max(values)
    best = next(x for x, value in enumerate(values) if value >= top - TIE_TOL)

    d = ensemble.dim
    effects = [np.zeros((d, d), dtype=np.complex128) for _ in range(m)]
    sub_effects = outcomes[best][1]
    if sub_effects is None:
        effects[scheme.combinations[best][0]] = np.eye(d)
    else:
        for a, b in enumerate(scheme.combinations[best]):
            effects[b] = sub_effects[a]

    return FreeGuessResult(
        value=float(values[best]),
        best_combination=best,
        per_combination_values=[float(v) for v in values],
        combinations=list(scheme.combinations),
        best_povm=Povm.from_arrays(effects),
        sub_povms=[Povm.from_arrays(arrays) if arrays is not None else Povm.trivial(d, n)
                   for _, arrays in outcomes],
    )


@dataclass(frozen=True)
class DiscriminationReport:
    """Guessing probability of M against the simulable optimum on one ensemble"""
    ensemble: Ensemble
    n: int
    p_guess: float
    optimal_free: float
    advantage_ratio: float
    best_combination: int
    combinations: Tuple[Tuple[int, ...], ...] = ()
    per_combination_values: Tuple[float, ...] = ()

    def to_dict(self):
        return {
            "n": self.n,
            "p_guess": self.p_guess,
            "optimal_free": self.optimal_free,
            "advantage_ratio": self.advantage_ratio,
            "best_combination": self.best_combination,
            "best_combination_labels": list(self.combinations[self.best_combination]) if self.combinations else None,
            "per_combination_values": list(self.per_combination_values),
            "ensemble": self.ensemble.to_dict(),
        }


def advantage(ensemble: Ensemble, povm: Povm, n: int, config: Optional[OptimizationConfig] = None,
              logger: Optional[OptimizationLogger] = None) -> DiscriminationReport:
    """
    Ratio P_guess(E, M) / max over simulable O of P_guess(E, O)

    Raises:
        DomainError: On shape mismatch, n out of range or a zero free optimum
    """
    p_guess = guess_probability(ensemble, povm)
    free = optimal_free_guess(ensemble, n, config, logger)
    if free.value <= 0:
        raise DomainError("Simulable optimum is zero; advantage ratio undefined")

    return DiscriminationReport(
        ensemble=ensemble,
        n=n,
        p_guess=p_guess,
        optimal_free=free.value,
        advantage_ratio=p_guess / free.value,
        best_combination=free.best_combination,
        combinations=tuple(free.combinations),
        per_combination_values=tuple(free.per_combination_values),
    )


class Certification(NamedTuple):
    certified_min_outcomes: int
    thresholds: List[float]
    exceeds_all: bool


def certification_thresholds(ensemble: Ensemble, max_k: Optional[int] = None,
                             config: Optional[OptimizationConfig] = None,
                             logger: Optional[OptimizationLogger] = None) -> List[float]:
    """optimal_free_guess(E, k) for k = 1 .. max_k (default |E|)"""
    max_k = max_k or ensemble.size
    return [optimal_free_guess(ensemble, k, config, logger).value for k in range(1, max_k + 1)]


@timed_operation("certify")
def certify(ensemble: Ensemble, observed_p: float, stat_tol: float = 0.0,
            config: Optional[OptimizationConfig] = None,
            logger: Optional[OptimizationLogger] = None) -> Certification:
    """
    Certification with its threshold table.

    Thresholds are computed lazily in k; the search stops at the first k whose
    simulable optimum (plus stat_tol) reaches the observed value.
    """
    if not 0.0 <= observed_p <= 1.0:
        raise DomainError(f"Observed guessing probability must lie in [0, 1], got {observed_p}")
    logger = logger or get_logger()

    m = ensemble.size
    thresholds: List[float] = []
    for k in range(1, m + 1):
        thresholds.append(optimal_free_guess(ensemble, k, config, logger).value)
        if observed_p <= thresholds[-1] + stat_tol:
            return Certification(k, thresholds, False)

    logger.logger.warning(
        f"Observed value {observed_p} exceeds the unrestricted optimum {thresholds[-1]:.10g}; "
        f"reporting {m} outcomes"
    )
    return Certification(m, thresholds, True)


def certify_outcomes(ensemble: Ensemble, observed_p: float, stat_tol: float = 0.0,
                     config: Optional[OptimizationConfig] = None,
                     logger: Optional[OptimizationLogger] = None) -> int:
    """
    Smallest outcome number k not excluded by the observed guessing probability

    Devices restricted to fewer than k outcomes cannot reach observed_p; the
    statistical tolerance is added to every threshold and defaults to zero.

    Raises:
        DomainError: If observed_p is outside [0, 1]
    """
    return certify(ensemble, observed_p, stat_tol, config, logger).certified_min_outcomes

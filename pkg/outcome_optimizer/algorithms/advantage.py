"""
Maximal advantage of m-outcome measurements over n-outcome-simulable ones

The advantage ratio of any m-outcome POVM in state discrimination is at most
m/n, and the bound is reached when d >= m by discriminating m uniformly
distributed orthogonal states with their projectors. The seesaw here searches
for the largest ratio in any (d, m, n), alternating between the ensemble
extracted from the robustness dual and the optimal measurement for that
ensemble.
"""

import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from ..core.exceptions import DomainError, InvariantViolationError, SolverFailureError
from ..core.models import Ensemble, HermitianMatrix, OptimizationConfig, Povm
from ..core.relabeling import enumerate_scheme, simulate
from ..utils import catalog
from ..utils.logging import OptimizationLogger, get_logger, log_warning
from .discrimination import advantage, guess_probability, optimal_free_guess, optimal_guess
from .robustness import robustness

BOUND_SLACK = 1e-6
MONOTONE_SLACK = 1e-9


def max_advantage_bound(m: int, n: int) -> Fraction:
    """Exact upper bound m/n on 1 + robustness of any m-outcome POVM"""
    if not 1 <= n <= m:
        raise DomainError(f"Need 1 <= n <= m, got n={n}, m={m}")
    return Fraction(m, n)


@dataclass(frozen=True)
class SaturatingInstance:
    """Uniform orthogonal ensemble, its projective measurement and the best simulable measurement"""
    d: int
    m: int
    n: int
    ensemble: Ensemble
    povm: Povm
    free_povm: Povm
    p_guess: float
    free_score: float

    @property
    def ratio(self) -> float:
        return self.p_guess / self.free_score

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d": self.d, "m": self.m, "n": self.n,
            "p_guess": self.p_guess,
            "free_score": self.free_score,
            "ratio": self.ratio,
            "ensemble": self.ensemble.to_dict(),
            "povm": self.povm.to_dict(),
            "free_povm": self.free_povm.to_dict(),
        }


def _projectors_with_completion(d: int, labels: Tuple[int, ...]) -> List[HermitianMatrix]:
    """Basis projectors on the given labels; the rest of the identity goes to the last one"""
    effects = [HermitianMatrix.basis_projector(d, i) for i in labels]
    rest = HermitianMatrix.identity(d)
    for effect in effects:
        rest = rest - effect
    effects[-1] = effects[-1] + rest
    return effects


def saturating_instance(d: int, m: int, n: int) -> SaturatingInstance:
    """
    Instance reaching the m/n bound

    The ensemble holds m orthogonal basis states with weight 1/m, the POVM their
    projectors (with I - sum of projectors folded into the last effect when d > m)
    and the free side is the uniform mixture over combinations x of the
    n-projector measurements on x_1 .. x_n, each completed to the identity.

    Raises:
        DomainError: If d < m or n is outside [1, m]
    """
    max_advantage_bound(m, n)
    if d < m:
        raise DomainError(f"Saturating instance needs d >= m, got d={d}, m={m}")

    ensemble = catalog.uniform_orthogonal_ensemble(d, m)
    povm = Povm(tuple(_projectors_with_completion(d, tuple(range(m)))))

    scheme = enumerate_scheme(m, n)
    sub_povms = [Povm(tuple(_projectors_with_completion(d, combination)))
                 for combination in scheme.combinations]
    weights = np.full(len(scheme), 1 / len(scheme))
    free_povm = simulate(scheme, sub_povms, weights)

    return SaturatingInstance(
        d=d, m=m, n=n,
        ensemble=ensemble,
        povm=povm,
        free_povm=free_povm,
        p_guess=guess_probability(ensemble, povm),
        free_score=guess_probability(ensemble, free_povm),
    )


def pre_measurement_info_game(ensemble: Ensemble, n: int, config: Optional[OptimizationConfig] = None,
                              logger: Optional[OptimizationLogger] = None) -> float:
    """
    Score of discrimination when the combination x is announced before measuring

    Each sub-ensemble {rho~_{x_a}} is discriminated optimally and every state
    belongs to C(m-1, n-1) combinations, so the score is
    sum_x s_x / C(m-1, n-1). It never falls below optimal_guess(E, m).

    Raises:
        DomainError: If n is outside [1, |E|]
    """
    free = optimal_free_guess(ensemble, n, config, logger)
    return float(sum(free.per_combination_values)) / comb(ensemble.size - 1, n - 1)


@dataclass(frozen=True)
class SeesawIteration:
    ensemble: Ensemble
    povm: Povm
    ratio: float


@dataclass(frozen=True)
class SeesawTrace:
    """Best run of the seesaw search over all restarts"""
    d: int
    m: int
    n: int
    iterations: Tuple[SeesawIteration, ...]
    final_ratio: float
    converged: bool
    restarts_used: int
    best_restart: int
    seeds: Tuple[str, ...]
    restart_ratios: Tuple[Optional[float], ...]
    saturation_guaranteed: bool
    warnings: Tuple[str, ...] = ()

    @property
    def ratios(self) -> List[float]:
        return [step.ratio for step in self.iterations]

    @property
    def bound(self) -> Fraction:
        return max_advantage_bound(self.m, self.n)

    def to_dict(self) -> Dict[str, Any]:
        final = self.iterations[-1] if self.iterations else None
        return {
            "d": self.d, "m": self.m, "n": self.n,
            "bound": float(self.bound),
            "final_ratio": self.final_ratio,
            "converged": self.converged,
            "restarts_used": self.restarts_used,
            "best_restart": self.best_restart,
            "seeds": list(self.seeds),
            "restart_ratios": list(self.restart_ratios),
            "ratios": self.ratios,
            "saturation_guaranteed": self.saturation_guaranteed,
            "final_ensemble": final.ensemble.to_dict() if final else None,
            "final_povm": final.povm.to_dict() if final else None,
            "warnings": list(self.warnings),
        }


def _starting_points(d: int, m: int, restarts: int, seed: int) -> List[Tuple[str, Povm]]:
    """Deterministic seed first, then random POVMs (rank one when m >= d)"""
    if d >= m:
        starts = [("saturating", saturating_instance(d, m, 1).povm)]
    else:
        starts = [("projective-basis", catalog.projective_basis(d, m))]

    rng = np.random.Generator(np.random.PCG64(seed))
    rank = 1 if m >= d else None
    while len(starts) < restarts:
        draw = int(rng.integers(0, 2 ** 32))
        starts.append((f"random-povm:{draw}", catalog.random_povm(d, m, draw, rank)))
    return starts[:max(restarts, 1)]


def _run_restart(povm: Povm, n: int, max_iter: int, tol: float, config: OptimizationConfig,
                 logger: Optional[OptimizationLogger]) -> Tuple[List[SeesawIteration], bool]:
    m = povm.outcome_count
    bound = float(max_advantage_bound(m, n)) + BOUND_SLACK
    iterations: List[SeesawIteration] = []
    converged = False

    for _ in range(max_iter):
        result = robustness(povm, n, config, logger)
        ensemble = result.extracted_ensemble
        if ensemble is None:
            raise SolverFailureError("Robustness dual returned a vanishing witness",
                                     diagnostics={"robustness": result.robustness})

        _, candidate = optimal_guess(ensemble, m, config, logger)
        ratio = advantage(ensemble, candidate, n, config, logger).advantage_ratio

        if ratio > bound:
            raise InvariantViolationError(f"Advantage ratio {ratio:.12g} exceeds the bound m/n = {bound:.12g}")

        if iterations and ratio < iterations[-1].ratio - MONOTONE_SLACK:
            converged = True
            break

        improvement = ratio - iterations[-1].ratio if iterations else np.inf
        iterations.append(SeesawIteration(ensemble, candidate, ratio))
        if improvement < tol:
            converged = True
            break
        povm = candidate

    return iterations, converged


def _guarded_restart(index: int, label: str, povm: Povm, n: int, max_iter: int, tol: float,
                     config: OptimizationConfig, logger: Optional[OptimizationLogger]):
    try:
        iterations, converged = _run_restart(povm, n, max_iter, tol, config, logger)
        return index, iterations, converged, None
    except SolverFailureError as e:
        message = f"Restart {index} ({label}) skipped: {e}"
        log_warning(message)
        return index, [], False, message


def seesaw(d: int, m: int, n: int, restarts: int = 20, max_iter: int = 100, tol: float = 1e-7,
           seed: int = 0, config: Optional[OptimizationConfig] = None,
           logger: Optional[OptimizationLogger] = None) -> SeesawTrace:
    """
    Search for the largest advantage ratio of m-outcome POVMs in dimension d

    Each iteration solves the robustness dual of the current POVM, takes the
    extracted ensemble and replaces the POVM with the optimal measurement for
    that ensemble. A run stops when the ratio improves by less than tol, when
    max_iter is reached or when a ratio falls below the previous one (the
    decreased value is not recorded). Restarts run in parallel with config.jobs
    workers; a restart whose solve fails is skipped with a warning.

    Args:
        d: Hilbert space dimension (>= 2)
        m: Outcome number of the searched POVMs
        n: Outcome number of the simulating POVMs
        restarts: Number of starting points (deterministic seed included)
        max_iter: Iteration cap per restart
        tol: Ratio stagnation threshold
        seed: Seed of the random starting points

    Returns:
        SeesawTrace of the best restart

    Raises:
        DomainError: On invalid (d, m, n)
        SolverFailureError: If every restart failed
    """
    if d < 2:
        raise DomainError(f"Seesaw needs d >= 2, got d={d}")
    max_advantage_bound(m, n)
    config = config or OptimizationConfig()
    logger = logger or get_logger()

    operation = f"seesaw(d={d}, m={m}, n={n})"
    logger.start_operation(operation, {"restarts": restarts, "max_iter": max_iter, "seed": seed})

    starts = _starting_points(d, m, restarts, seed)
    worker_config = dataclasses.replace(config, jobs=1)
    worker_logger = logger if config.jobs == 1 else None

    outcomes = Parallel(n_jobs=config.jobs)(
        delayed(_guarded_restart)(index, label, povm, n, max_iter, tol, worker_config, worker_logger)
        for index, (label, povm) in enumerate(starts)
    )

    warnings: List[str] = []
    best = None
    restart_ratios: List[Optional[float]] = []
    for index, iterations, converged, warning in sorted(outcomes, key=lambda o: o[0]):
        if warning:
            warnings.append(warning)
        final = iterations[-1].ratio if iterations else None
        restart_ratios.append(final)
        if final is not None and (best is None or final > best[1][-1].ratio):
            best = (index, iterations, converged)

    if best is None:
        logger.end_operation(operation, success=False)
        raise SolverFailureError(f"{operation}: every restart failed", diagnostics={"warnings": warnings})

    saturation_guaranteed = d >= m
    if not saturation_guaranteed:
        warnings.append(f"d={d} < m={m}: the bound m/n is not known to be reached")

    index, iterations, converged = best
    trace = SeesawTrace(
        d=d, m=m, n=n,
        iterations=tuple(iterations),
        final_ratio=iterations[-1].ratio,
        converged=converged,
        restarts_used=len(starts),
        best_restart=index,
        seeds=tuple(label for label, _ in starts),
        restart_ratios=tuple(restart_ratios),
        saturation_guaranteed=saturation_guaranteed,
        warnings=tuple(warnings),
    )
    logger.end_operation(operation, success=True, result={"final_ratio": trace.final_ratio})
    return trace

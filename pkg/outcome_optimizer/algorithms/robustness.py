"""
Robustness of a POVM with respect to the n-outcome-simulable set

The robustness of an m-outcome POVM M is the least t >= 0 such that
(M_b + t N_b) / (1 + t) is a mixture of relabeled n-outcome POVMs. It is
computed by the substituted primal program over scaled sub-measurements
Q~_{a|x} = (1 + t) p(x) Q_{a|x}:

    minimize   (1/d) sum_{a,x} tr Q~_{a|x}
    subject to Q~_{a|x} >= 0
               sum_{(a,x): x_a = b} Q~_{a|x} - M_b >= 0            for every b
               sum_a Q~_{a|x} - (1/d) sum_a tr(Q~_{a|x}) I = 0     for every x

and by its dual

    maximize   sum_b tr(M_b Y_b)
    subject to Z_x - tr(Z_x) I/d + Y_{x_a} <= I/d                for every a, x
               Y_b >= 0, Z_x Hermitian.

Both programs are solved; their optimal values agree (Q~ = I is strictly
feasible) and the normalized dual witness Y_b / sum tr Y_b is the state
ensemble on which M beats the simulable set by exactly 1 + R.
"""

import dataclasses
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..core.exceptions import DomainError, InvariantViolationError, SolverFailureError
from ..core.linalg import effective_outcome_count, min_eigenvalue
from ..core.models import Ensemble, HermitianMatrix, OptimizationConfig, Povm
from ..core.relabeling import RelabelingScheme, enumerate_scheme, simulate
from ..solvers.conic import SdpProblem, SdpSolution, solve
from ..utils.logging import OptimizationLogger, get_logger, timed_operation

UNUSED_COMBINATION_WEIGHT = 1e-12
MIN_WITNESS_SCALE = 1e-10


def _q_name(x: int, a: int) -> str:
    return f"Q[{x},{a}]"


def _y_name(b: int) -> str:
    return f"Y[{b}]"


def _z_name(x: int) -> str:
    return f"Z[{x}]"


def _check_outcomes(povm: Povm, n: int) -> RelabelingScheme:
    if not 1 <= n <= povm.outcome_count:
        raise DomainError(f"Need 1 <= n <= m, got n={n}, m={povm.outcome_count}")
    return enumerate_scheme(povm.outcome_count, n)


def build_primal(povm: Povm, n: int) -> SdpProblem:
    """
    Primal robustness program: n * C(m, n) PSD blocks, m matrix inequalities and
    C(m, n) proportional-to-identity equalities, minimized.

    Raises:
        DomainError: If n is outside [1, m]
    """
    scheme = _check_outcomes(povm, n)
    d = povm.dim
    problem = SdpProblem(f"robustness_primal_m{scheme.m}_n{n}_d{d}")

    blocks = {}
    for x, _ in enumerate(scheme.combinations):
        for a in range(n):
            blocks[x, a] = problem.add_psd(_q_name(x, a), d)

    problem.minimize(sum(block.trace() for block in blocks.values()) / d)

    for b in range(scheme.m):
        covering = [blocks[x, a] for x, combination in enumerate(scheme.combinations)
                    for a, label in enumerate(combination) if label == b]
        problem.add_lmi(f"cover[{b}]",
                        sum(block.embedded for block in covering) - problem.constant(povm.effects[b]))

    identity = problem.identity(d)
    for x, _ in enumerate(scheme.combinations):
        members = [blocks[x, a] for a in range(n)]
        total_trace = sum(block.trace() for block in members)
        problem.add_equality(f"proportional[{x}]",
                             sum(block.embedded for block in members) - total_trace * (identity / d))

    return problem


def build_dual(povm: Povm, n: int) -> SdpProblem:
    """
    Dual robustness program: m PSD witness blocks Y_b, C(m, n) free Hermitian
    blocks Z_x and one matrix inequality per (a, x), maximized.

    Raises:
        DomainError: If n is outside [1, m]
    """
    scheme = _check_outcomes(povm, n)
    d = povm.dim
    problem = SdpProblem(f"robustness_dual_m{scheme.m}_n{n}_d{d}")

    witnesses = [problem.add_psd(_y_name(b), d) for b in range(scheme.m)]
    free_duals = [problem.add_hermitian(_z_name(x), d) for x in range(len(scheme))]

    problem.maximize(sum(y.inner(effect) for y, effect in zip(witnesses, povm.effects)))

    identity = problem.identity(d)
    for x, combination in enumerate(scheme.combinations):
        z = free_duals[x]
        centred = z.embedded - z.trace() * (identity / d)
        for a, b in enumerate(combination):
            problem.add_lmi(f"bound[{x},{a}]", identity / d - centred - witnesses[b].embedded)

    return problem


@dataclass(frozen=True)
class RobustnessResult:
    """Primal/dual solution of the robustness programs and the recovered simulation"""
    m: int
    n: int
    d: int
    robustness: float
    primal_value: float
    dual_value: float
    gap: float
    scheme: RelabelingScheme
    scaled_sub_povms: Tuple[Tuple[HermitianMatrix, ...], ...]
    witness_effects: Tuple[HermitianMatrix, ...]
    free_duals: Tuple[HermitianMatrix, ...]
    extracted_ensemble: Optional[Ensemble]
    weights: Tuple[float, ...]
    sub_povms: Tuple[Optional[Povm], ...]
    noise: Tuple[HermitianMatrix, ...]
    simulated_povm: Optional[Povm]
    solver: Dict[str, Any] = field(default_factory=dict)
    warnings: Tuple[str, ...] = ()
    simulability_threshold: float = OptimizationConfig.simulability_threshold

    @property
    def is_simulable(self) -> bool:
        return self.robustness <= self.simulability_threshold

    def validate(self, gap_tol: float = 1e-6, psd_tol: float = 1e-8) -> List[str]:
        """Check the result invariants; returns a list of issues"""
        issues = []

        if self.primal_value - 1.0 < -gap_tol:
            issues.append(f"Primal value {self.primal_value:.10g} below 1")

        if self.gap > gap_tol:
            issues.append(f"Duality gap {self.gap:.3e} exceeds {gap_tol:.1e}")

        for b, y in enumerate(self.witness_effects):
            if min_eigenvalue(y) < -psd_tol:
                issues.append(f"Witness Y[{b}] not PSD (min eigenvalue {min_eigenvalue(y):.3e})")

        for x, blocks in enumerate(self.scaled_sub_povms):
            for a, q in enumerate(blocks):
                if min_eigenvalue(q) < -psd_tol:
                    issues.append(f"Scaled sub-POVM Q[{x},{a}] not PSD (min eigenvalue {min_eigenvalue(q):.3e})")

        if self.extracted_ensemble is None:
            issues.append("Dual witness gave no ensemble")

        return issues

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m": self.m,
            "n": self.n,
            "d": self.d,
            "robustness": self.robustness,
            "simulability_threshold": self.simulability_threshold,
            "primal_value": self.primal_value,
            "dual_value": self.dual_value,
            "gap": self.gap,
            "combinations": [list(c) for c in self.scheme.combinations],
            "weights": list(self.weights),
            "scaled_sub_povms": [[q.to_dict() for q in blocks] for blocks in self.scaled_sub_povms],
            "sub_povms": [p.to_dict() if p is not None else None for p in self.sub_povms],
            "witness_effects": [y.to_dict() for y in self.witness_effects],
            "free_duals": [z.to_dict() for z in self.free_duals],
            "noise": [t.to_dict() for t in self.noise],
            "simulated_povm": self.simulated_povm.to_dict() if self.simulated_povm else None,
            "extracted_ensemble": self.extracted_ensemble.to_dict() if self.extracted_ensemble else None,
            "solver": dict(self.solver),
            "warnings": list(self.warnings),
        }


def _recover_simulation(scheme: RelabelingScheme, scaled: Tuple[Tuple[HermitianMatrix, ...], ...],
                        primal_value: float, d: int, config: OptimizationConfig,
                        warnings: List[str]):
    """Weights p(x), normalized sub-POVMs Q_{a|x} and the simulated free POVM"""
    masses = np.array([sum(q.trace for q in blocks) for blocks in scaled])
    weights = masses / (d * primal_value)

    sub_povms: List[Optional[Povm]] = []
    for x, blocks in enumerate(scaled):
        if weights[x] < UNUSED_COMBINATION_WEIGHT:
            sub_povms.append(None)
            continue
        scale = d / masses[x]
        try:
            sub_povms.append(Povm.sanitize([q.data * scale for q in blocks],
                                           tol=max(config.result_psd_tol, config.result_psd_tol * scale)))
        except InvariantViolationError as e:
            warnings.append(f"Sub-POVM of combination {list(scheme.combinations[x])} not recoverable: {e}")
            sub_povms.append(None)

    used = np.array([w if p is not None else 0.0 for w, p in zip(weights, sub_povms)])
    simulated = None
    if used.sum() > 0:
        placeholder = Povm.from_arrays([np.eye(d) / scheme.n] * scheme.n)
        simulated = simulate(scheme, [p if p is not None else placeholder for p in sub_povms],
                             used / used.sum())

    return tuple(float(w) for w in weights), tuple(sub_povms), simulated


def _extract_ensemble(witnesses: Tuple[HermitianMatrix, ...], config: OptimizationConfig,
                      warnings: List[str]) -> Optional[Ensemble]:
    scale = sum(y.trace for y in witnesses)
    if scale < MIN_WITNESS_SCALE:
        warnings.append(f"Dual witness trace {scale:.3e} below {MIN_WITNESS_SCALE:.0e}; ensemble absent")
        return None
    try:
        return Ensemble.sanitize([y.data for y in witnesses],
                                 tol=max(config.result_psd_tol, config.result_psd_tol / scale))
    except InvariantViolationError as e:
        warnings.append(f"Dual witness not normalizable to an ensemble: {e}")
        return None


def robustness(povm: Povm, n: int, config: Optional[OptimizationConfig] = None,
               logger: Optional[OptimizationLogger] = None) -> RobustnessResult:
    """
    Solve both robustness programs for (M, n)

    Args:
        povm: The m-outcome measurement M
        n: Outcome number of the simulating measurements
        config: Tolerances and solver settings
        logger: Logger receiving operation and solve records

    Returns:
        RobustnessResult with robustness = max(primal - 1, 0)

    Raises:
        DomainError: If n is outside [1, m]
        SolverFailureError: If either solve fails or a result invariant
            (duality gap, PSD residual, primal value >= 1) is violated
    """
    config = config or OptimizationConfig()
    logger = logger or get_logger()
    m, d = povm.outcome_count, povm.dim
    operation = f"robustness(m={m}, n={n}, d={d})"
    logger.start_operation(operation, {"m": m, "n": n, "d": d})

    try:
        primal_problem = build_primal(povm, n)
        dual_problem = build_dual(povm, n)
        scheme = enumerate_scheme(m, n)

        primal: SdpSolution = solve(primal_problem, config=config, logger=logger).require_optimal("Robustness primal")
        dual: SdpSolution = solve(dual_problem, config=config, logger=logger).require_optimal("Robustness dual")

        warnings: List[str] = []
        primal_value = float(primal.objective_value)
        dual_value = float(dual.objective_value)
        gap = abs(primal_value - dual_value)
        # Output checks follow the tolerance the solves reached
        checked = dataclasses.replace(config, result_psd_tol=max(config.result_psd_tol,
                                                                 primal.tolerance, dual.tolerance))

        scaled = tuple(tuple(primal.values[_q_name(x, a)] for a in range(n)) for x in range(len(scheme)))
        witnesses = tuple(dual.values[_y_name(b)] for b in range(m))
        free_duals = tuple(dual.values[_z_name(x)] for x in range(len(scheme)))

        cover = [HermitianMatrix.zero(d) for _ in range(m)]
        for x, combination in enumerate(scheme.combinations):
            for a, b in enumerate(combination):
                cover[b] = cover[b] + scaled[x][a]
        noise = tuple(cover[b] - povm.effects[b] for b in range(m))

        weights, sub_povms, simulated = _recover_simulation(scheme, scaled, primal_value, d, checked, warnings)
        ensemble = _extract_ensemble(witnesses, checked, warnings)

        result = RobustnessResult(
            m=m, n=n, d=d,
            robustness=max(primal_value - 1.0, 0.0),
            primal_value=primal_value,
            dual_value=dual_value,
            gap=gap,
            scheme=scheme,
            scaled_sub_povms=scaled,
            witness_effects=witnesses,
            free_duals=free_duals,
            extracted_ensemble=ensemble,
            weights=weights,
            sub_povms=sub_povms,
            noise=noise,
            simulated_povm=simulated,
            solver={"backend": primal.backend, "tolerance": max(primal.tolerance, dual.tolerance),
                    "retried": primal.retried or dual.retried,
                    "inaccurate": primal.inaccurate or dual.inaccurate},
            warnings=tuple(warnings),
            simulability_threshold=config.simulability_threshold,
        )

        issues = result.validate(config.gap_tol, checked.result_psd_tol)
        logger.log_validation(operation, issues)
        if issues:
            for message in issues:
                logger.logger.error(message)
            raise SolverFailureError(f"{operation}: result invariants violated",
                                     diagnostics={"issues": issues, "primal_value": primal_value,
                                                  "dual_value": dual_value, "gap": gap})
    except Exception as e:
        logger.end_operation(operation, success=False, result={"error": str(e)})
        raise

    logger.end_operation(operation, success=True,
                         result={"robustness": result.robustness, "gap": result.gap})
    return result


@timed_operation("effective_outcome_number")
def effective_outcome_number(povm: Povm, config: Optional[OptimizationConfig] = None,
                             logger: Optional[OptimizationLogger] = None) -> int:
    """
    Least k such that M is simulable by k-outcome measurements.

    The search runs over k = 1 .. upper - 1 with upper = min(m, d^2, number of
    nonzero effects); a POVM is always simulable at upper (a POVM with c nonzero
    effects is a relabeling of a c-outcome one, and extremal POVMs have at most
    d^2 outcomes).
    """
    config = config or OptimizationConfig()
    upper = min(povm.outcome_count, povm.dim ** 2, max(effective_outcome_count(povm), 1))

    for k in range(1, upper):
        result = robustness(povm, k, config, logger)
        if result.is_simulable:
            return k
    return upper

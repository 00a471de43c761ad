"""
Generalized prepare-and-measure scores

A linear score S = sum_{x,y,b} c_{x,y,b} p(x) p(b|x,y) with p(b|x,y) = tr(rho_x M_{b|y})
depends on the measurement assemblage only through the linear map

    f: {M_{b|y}} -> {N_x},   N_x = sum_{y,b} c_{x,y,b} M_{b|y},

so that S = sum_x p(x) tr(rho_x N_x). A Hermitian family {W_x} separating f(A)
from f(free set) becomes a valid preparation ensemble once shifted by the
smallest eigenvalue and normalized; on that ensemble A scores strictly above
every free assemblage.
"""

from dataclasses import dataclass
from math import comb
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.exceptions import DegenerateInputError, DomainError
from ..core.models import Ensemble, HermitianMatrix, MeasurementAssemblage, OptimizationConfig, Povm
from ..core.relabeling import enumerate_scheme
from ..solvers.conic import SdpProblem, solve
from ..utils.logging import OptimizationLogger, get_logger
from .robustness import robustness

SEPARATION_TOL = 1e-7

Preparations = Sequence[Tuple[float, Union[HermitianMatrix, np.ndarray]]]


@dataclass(frozen=True, eq=False)
class ScoreCoefficients:
    """Real coefficients c[x][y][b]"""
    c: np.ndarray

    def __post_init__(self):
        try:
            array = np.array(self.c, dtype=float)
        except (TypeError, ValueError) as e:
            raise DomainError(f"Score coefficients must be a rectangular real array: {e}")
        if array.ndim != 3 or 0 in array.shape:
            raise DomainError(f"Score coefficients need shape (X, Y, B), got {array.shape}")
        if not np.all(np.isfinite(array)):
            raise DomainError("Score coefficients must be finite")
        array.flags.writeable = False
        object.__setattr__(self, "c", array)

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.c.shape

    @property
    def X(self) -> int:
        return self.c.shape[0]

    @property
    def Y(self) -> int:
        return self.c.shape[1]

    @property
    def B(self) -> int:
        return self.c.shape[2]

    def scaled(self, factor: float) -> "ScoreCoefficients":
        return ScoreCoefficients(self.c * factor)

    def to_dict(self) -> Dict[str, Any]:
        return {"X": self.X, "Y": self.Y, "B": self.B, "c": self.c.tolist()}

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "ScoreCoefficients":
        coefficients = cls(payload["c"])
        declared = (payload.get("X", coefficients.X), payload.get("Y", coefficients.Y),
                    payload.get("B", coefficients.B))
        if declared != coefficients.shape:
            raise DomainError(f"Declared shape {declared} differs from coefficient shape {coefficients.shape}")
        return coefficients


def _effect_stack(coefficients: ScoreCoefficients, assemblage: MeasurementAssemblage) -> np.ndarray:
    """Effects as an array of shape (Y, B, d, d)"""
    if assemblage.setting_count != coefficients.Y:
        raise DomainError(f"Coefficients expect {coefficients.Y} settings, assemblage has {assemblage.setting_count}")
    for y, povm in enumerate(assemblage.settings):
        if povm.outcome_count != coefficients.B:
            raise DomainError(f"Setting {y} has {povm.outcome_count} outcomes, coefficients expect {coefficients.B}")
    return np.array([povm.arrays() for povm in assemblage.settings])


def _preparation_arrays(preparations: Union[Ensemble, Preparations], count: int) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(preparations, Ensemble):
        preparations = preparations.preparations()
    if len(preparations) != count:
        raise DomainError(f"Expected {count} preparations, got {len(preparations)}")
    priors = np.array([float(p) for p, _ in preparations])
    states = np.array([s.data if isinstance(s, HermitianMatrix) else np.asarray(s, dtype=np.complex128)
                       for _, s in preparations])
    return priors, states


def score(coefficients: ScoreCoefficients, preparations: Union[Ensemble, Preparations],
          assemblage: MeasurementAssemblage) -> float:
    """
    S = sum c_{x,y,b} p(x) tr(rho_x M_{b|y}), from the outcome probabilities

    Raises:
        DomainError: If the index ranges of c, preparations and assemblage differ
    """
    effects = _effect_stack(coefficients, assemblage)
    priors, states = _preparation_arrays(preparations, coefficients.X)
    if states.shape[1] != assemblage.dim:
        raise DomainError(f"Preparations have dimension {states.shape[1]}, assemblage {assemblage.dim}")
    probabilities = np.einsum("xij,ybji->xyb", states, effects).real
    return float(np.einsum("xyb,x,xyb->", coefficients.c, priors, probabilities))


def apply_f(coefficients: ScoreCoefficients, assemblage: MeasurementAssemblage) -> List[HermitianMatrix]:
    """N_x = sum_{y,b} c_{x,y,b} M_{b|y}"""
    effects = _effect_stack(coefficients, assemblage)
    mapped = np.einsum("xyb,ybij->xij", coefficients.c, effects)
    return [HermitianMatrix.hermitize(n) for n in mapped]


def family_score(preparations: Union[Ensemble, Preparations], family: Sequence[HermitianMatrix]) -> float:
    """sum_x p(x) tr(rho_x N_x)"""
    priors, states = _preparation_arrays(preparations, len(family))
    return float(sum(p * np.trace(s @ n.data).real for p, s, n in zip(priors, states, family)))


@dataclass(frozen=True)
class WitnessFamily:
    """Hermitian witness W_x and its PSD shift W_x + shift * I"""
    raw: Tuple[HermitianMatrix, ...]
    shifted: Tuple[HermitianMatrix, ...]
    shift: float

    def value(self, family: Sequence[HermitianMatrix]) -> float:
        """sum_x tr(W_x N_x)"""
        return float(sum(w.inner(n) for w, n in zip(self.raw, family)))

    def shifted_value(self, family: Sequence[HermitianMatrix]) -> float:
        return float(sum(w.inner(n) for w, n in zip(self.shifted, family)))

    def to_dict(self) -> Dict[str, Any]:
        return {"shift": self.shift, "raw": [w.to_dict() for w in self.raw],
                "shifted": [w.to_dict() for w in self.shifted]}


def witness_to_ensemble(witness: Sequence[Union[HermitianMatrix, np.ndarray]]) -> Tuple[Ensemble, WitnessFamily]:
    """
    Shift a witness family by |lambda| I (lambda the smallest eigenvalue over the
    whole family, when negative) and normalize to an ensemble
    p(x) rho_x = W~_x / sum_x tr W~_x.

    The shift adds the same multiple of sum_x tr(N_x) to the value of every
    family, so strict orderings between families with equal total trace are kept.

    Raises:
        DegenerateInputError: If the shifted family has zero total trace
    """
    if len(witness) == 0:
        raise DegenerateInputError("Empty witness family")
    raw = tuple(w if isinstance(w, HermitianMatrix) else HermitianMatrix(w) for w in witness)
    dims = {w.dim for w in raw}
    if len(dims) != 1:
        raise DomainError(f"Witness members have mixed dimensions: {sorted(dims)}")
    d = dims.pop()

    smallest = min(float(np.linalg.eigvalsh(w.data)[0]) for w in raw)
    shift = max(0.0, -smallest)
    shifted = tuple(w + HermitianMatrix.identity(d) * shift for w in raw)

    total = sum(w.trace for w in shifted)
    if total <= 1e-12:
        raise DegenerateInputError("Witness family has zero total trace after the shift")

    ensemble = Ensemble.sanitize([w.data / total for w in shifted])
    return ensemble, WitnessFamily(raw=raw, shifted=shifted, shift=shift)


def discrimination_coefficients(m: int) -> ScoreCoefficients:
    """c_{x,0,b} = delta_{x,b}: the score is the guessing probability"""
    if m < 1:
        raise DomainError(f"Need m >= 1, got {m}")
    return ScoreCoefficients(np.eye(m).reshape(m, 1, m))


def is_discrimination_specialized(coefficients: ScoreCoefficients, atol: float = 1e-12) -> bool:
    """True when c is a positive multiple of the discrimination coefficients"""
    if coefficients.Y != 1 or coefficients.X != coefficients.B:
        return False
    matrix = coefficients.c[:, 0, :]
    scale = matrix[0, 0]
    return bool(scale > 0 and np.allclose(matrix, scale * np.eye(coefficients.X), atol=atol, rtol=0))


def coefficient_rank(coefficients: ScoreCoefficients) -> int:
    """Rank of the X x (Y*B) coefficient matrix; f acts as this matrix tensored with the identity"""
    return int(np.linalg.matrix_rank(coefficients.c.reshape(coefficients.X, coefficients.Y * coefficients.B)))


def is_bijective(coefficients: ScoreCoefficients) -> bool:
    rows, cols = coefficients.X, coefficients.Y * coefficients.B
    return rows == cols and coefficient_rank(coefficients) == rows


def pre_measurement_instance(ensemble: Ensemble, n: int) -> Tuple[ScoreCoefficients, List[Tuple[float, HermitianMatrix]]]:
    """
    Discrimination with pre-measurement information as a generalized score

    Settings y are the combinations w of n labels out of m; preparations are
    indexed by x = (w, a) and carry rho~_{w_a} / C(m-1, n-1), and
    c_{(w,a), y, b} = delta_{b,a} delta_{w,y}. With setting w measuring the
    sub-ensemble of w, the score equals the pre-measurement information game.

    Raises:
        DomainError: If n is outside [1, |E|]
    """
    m = ensemble.size
    scheme = enumerate_scheme(m, n)
    repetitions = comb(m - 1, n - 1)
    settings = len(scheme)

    c = np.zeros((settings * n, settings, n))
    preparations: List[Tuple[float, HermitianMatrix]] = []
    for w, combination in enumerate(scheme.combinations):
        for a, label in enumerate(combination):
            c[w * n + a, w, a] = 1.0
            state = ensemble.states[label]
            weight = state.trace / repetitions
            if state.trace > 0:
                preparations.append((weight, HermitianMatrix(state.data / state.trace)))
            else:
                preparations.append((0.0, HermitianMatrix(np.eye(ensemble.dim) / ensemble.dim)))
    return ScoreCoefficients(c), preparations


def _separating_witness(coefficients: ScoreCoefficients, assemblage: MeasurementAssemblage,
                        free_samples: Sequence[MeasurementAssemblage], config: OptimizationConfig,
                        logger: OptimizationLogger) -> Tuple[float, List[HermitianMatrix]]:
    """maximize sum tr(W_x N_x) - max_j sum tr(W_x N^j_x) over -I <= W_x <= I"""
    target = apply_f(coefficients, assemblage)
    competitors = [apply_f(coefficients, sample) for sample in free_samples]
    d = assemblage.dim

    problem = SdpProblem(f"separating_witness_X{coefficients.X}_d{d}_J{len(competitors)}")
    witnesses = [problem.add_hermitian(f"W[{x}]", d) for x in range(coefficients.X)]
    level = problem.add_scalar("level")
    identity = problem.identity(d)
    for x, w in enumerate(witnesses):
        problem.add_lmi(f"upper[{x}]", identity - w.embedded)
        problem.add_lmi(f"lower[{x}]", identity + w.embedded)
    for j, family in enumerate(competitors):
        problem.add_inequality(f"free[{j}]", level.variable - sum(w.inner(n) for w, n in zip(witnesses, family)))
    problem.maximize(sum(w.inner(n) for w, n in zip(witnesses, target)) - level.variable)

    solution = solve(problem, config=config, logger=logger).require_optimal("Separating witness")
    return float(solution.objective_value), [solution.values[f"W[{x}]"] for x in range(coefficients.X)]


@dataclass(frozen=True)
class GeneralizedAdvantage:
    """Score ratio of an assemblage against sampled free assemblages"""
    ratio: float
    score: float
    free_score: float
    best_free_sample: int
    ensemble: Ensemble
    method: str
    separation: Optional[float] = None
    robustness: Optional[float] = None
    witness: Optional[WitnessFamily] = None
    degenerate: bool = False
    bijective: bool = True
    warnings: Tuple[str, ...] = ()

    @property
    def resourceful(self) -> bool:
        return not self.degenerate and self.ratio > 1.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ratio": None if self.degenerate else self.ratio,
            "score": self.score,
            "free_score": self.free_score,
            "best_free_sample": self.best_free_sample,
            "method": self.method,
            "separation": self.separation,
            "robustness": self.robustness,
            "degenerate": self.degenerate,
            "bijective": self.bijective,
            "resourceful": self.resourceful,
            "ensemble": self.ensemble.to_dict(),
            "witness": self.witness.to_dict() if self.witness else None,
            "warnings": list(self.warnings),
        }


def generalized_advantage(coefficients: ScoreCoefficients, assemblage: MeasurementAssemblage,
                          free_samples: Sequence[MeasurementAssemblage],
                          preparations: Optional[Union[Ensemble, Preparations]] = None,
                          n: Optional[int] = None,
                          config: Optional[OptimizationConfig] = None,
                          logger: Optional[OptimizationLogger] = None) -> GeneralizedAdvantage:
    """
    S(E, A) / max_j S(E, A_j) over explicitly sampled free assemblages A_j

    The ensemble E is, in order of preference: the given preparations; the
    ensemble extracted from the robustness dual when c is the discrimination
    specialization and n is given; the shifted separating witness found by an
    SDP over the sampled free set. When no sample is separated, the uniform
    maximally mixed ensemble is used and the ratio is at most one whenever A is
    among the samples.

    Raises:
        DomainError: On index mismatches or an empty sample list
    """
    if not free_samples:
        raise DomainError("At least one free sample is required")
    config = config or OptimizationConfig()
    logger = logger or get_logger()
    notes: List[str] = []

    bijective = is_bijective(coefficients)
    if not bijective:
        message = (f"Coefficient map is not bijective (rank {coefficient_rank(coefficients)} for "
                   f"{coefficients.X} x {coefficients.Y * coefficients.B})")
        logger.logger.warning(message)
        notes.append(message)

    separation = None
    robustness_value = None
    witness = None

    if preparations is not None:
        method = "given"
        _, states = _preparation_arrays(preparations, coefficients.X)
        ensemble = preparations if isinstance(preparations, Ensemble) else Ensemble.from_preparations(
            [p for p, _ in preparations], list(states))
    elif n is not None and is_discrimination_specialized(coefficients):
        method = "robustness-dual"
        result = robustness(assemblage.settings[0], n, config, logger)
        robustness_value = result.robustness
        if result.extracted_ensemble is None:
            raise DegenerateInputError("Robustness dual gave no ensemble")
        ensemble = result.extracted_ensemble
    else:
        separation, raw = _separating_witness(coefficients, assemblage, free_samples, config, logger)
        if separation > SEPARATION_TOL:
            method = "separating-witness"
            ensemble, witness = witness_to_ensemble(raw)
        else:
            method = "no-separation"
            notes.append(f"No sampled free assemblage is separated (margin {separation:.3e})")
            ensemble = Ensemble(tuple(HermitianMatrix.identity(assemblage.dim) * (1 / (assemblage.dim * coefficients.X))
                                      for _ in range(coefficients.X)))

    value = score(coefficients, ensemble, assemblage)
    free_values = [score(coefficients, ensemble, sample) for sample in free_samples]
    best = int(np.argmax(free_values))
    free_value = free_values[best]

    degenerate = free_value <= 0
    if degenerate:
        message = f"Free score {free_value:.3e} is not positive; ratio undefined"
        logger.logger.warning(message)
        notes.append(message)

    return GeneralizedAdvantage(
        ratio=value / free_value if not degenerate else float("nan"),
        score=value,
        free_score=free_value,
        best_free_sample=best,
        ensemble=ensemble,
        method=method,
        separation=separation,
        robustness=robustness_value,
        witness=witness,
        degenerate=degenerate,
        bijective=bijective,
        warnings=tuple(notes),
    )


def discrimination_assemblage(povm: Povm) -> MeasurementAssemblage:
    return MeasurementAssemblage((povm,))

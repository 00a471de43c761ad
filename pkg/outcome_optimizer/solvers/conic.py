"""
Conic adapter: Hermitian semidefinite programs as real symmetric SDPs

Model builders declare Hermitian matrix blocks (PSD or free) and scalar blocks,
write constraints and objectives in terms of those blocks, and call solve().
Every Hermitian d x d block H = R + iI is represented by the real symmetric
2d x 2d matrix [[R, -I], [I, R]] (each eigenvalue of H appears twice), so that

    Re tr(H K) = tr(embed(H) embed(K)) / 2,   tr(H) = tr(embed(H)) / 2.

The factor 1/2 lives here only: HermitianBlock.trace() and HermitianBlock.inner()
return complex-domain quantities.

Backends are detected at runtime in preference order (Clarabel interior point
first, SCS as fallback), through cvxpy. A solve that still fails after its
retry moves on to the next installed backend.
"""

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

try:
    import cvxpy as cp
    CVXPY_AVAILABLE = True
except ImportError:
    CVXPY_AVAILABLE = False

from ..core.exceptions import DomainError, SolverFailureError
from ..core.linalg import as_hermitian, HermitianLike
from ..core.models import HermitianMatrix, OptimizationConfig
from ..utils.logging import OptimizationLogger, get_logger
from .base import BackendOutcome, SolverBackend

BACKEND_PREFERENCE = ["CLARABEL", "SCS"]

_FAILURE_STATUSES = {"optimal_inaccurate", "infeasible_inaccurate", "unbounded_inaccurate",
                     "user_limit", "solver_error"}


class SolveStatus(Enum):
    """Outcome of a solve as seen by model builders"""
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NUMERICAL_FAILURE = "numerical-failure"


class ObjectiveSense(Enum):
    MINIMIZE = "min"
    MAXIMIZE = "max"


def embed_hermitian(matrix: HermitianLike) -> np.ndarray:
    """Real symmetric embedding [[Re H, -Im H], [Im H, Re H]] of dimension 2d"""
    hermitian = as_hermitian(matrix)
    re, im = hermitian.re, hermitian.im
    return np.block([[re, -im], [im, re]])


def extract_hermitian(embedded: np.ndarray) -> HermitianMatrix:
    """
    Inverse of embed_hermitian for (approximately) structured solver output.

    The real part is the average of the diagonal blocks, symmetrized; the
    imaginary part is the average of the off-diagonal blocks, antisymmetrized.
    """
    embedded = np.asarray(embedded, dtype=float)
    dim = embedded.shape[0] // 2
    upper_left, upper_right = embedded[:dim, :dim], embedded[:dim, dim:]
    lower_left, lower_right = embedded[dim:, :dim], embedded[dim:, dim:]

    re = (upper_left + lower_right) / 2
    re = (re + re.T) / 2
    im = (lower_left - upper_right) / 2
    im = (im - im.T) / 2
    return HermitianMatrix(re + 1j * im)


class HermitianBlock:
    """A d x d Hermitian matrix variable, PSD-constrained or free"""

    def __init__(self, name: str, dim: int, psd: bool):
        if dim < 1:
            raise DomainError(f"Block {name} needs dimension >= 1")
        self.name = name
        self.dim = dim
        self.psd = psd
        self.variable = cp.Variable((2 * dim, 2 * dim), symmetric=True, name=name)

    @property
    def embedded(self):
        return self.variable

    def structure_constraints(self) -> list:
        """Equalities forcing the [[R, -I], [I, R]] block pattern"""
        d = self.dim
        x = self.variable
        return [
            x[:d, :d] == x[d:, d:],
            x[:d, d:] + x[:d, d:].T == 0,
        ]

    def trace(self):
        return cp.trace(self.variable) / 2

    def inner(self, matrix: HermitianLike):
        """Re tr(matrix . block)"""
        return cp.sum(cp.multiply(embed_hermitian(matrix), self.variable)) / 2

    def value(self) -> Optional[HermitianMatrix]:
        if self.variable.value is None:
            return None
        return extract_hermitian(self.variable.value)

    def assign(self, matrix: HermitianLike):
        self.variable.value = embed_hermitian(matrix)


class ScalarBlock:
    """A real scalar variable, optionally nonnegative"""

    def __init__(self, name: str, nonneg: bool = False):
        self.name = name
        self.nonneg = nonneg
        self.variable = cp.Variable(nonneg=nonneg, name=name)
        self.psd = False
        self.dim = 1

    def value(self) -> Optional[float]:
        return None if self.variable.value is None else float(self.variable.value)

    def assign(self, value: float):
        self.variable.value = float(value)


Block = Union[HermitianBlock, ScalarBlock]


@dataclass(frozen=True)
class SdpSolution:
    """Primal/dual solution of one SdpProblem"""
    status: SolveStatus
    objective_value: float
    gap: float
    values: Dict[str, Any] = field(default_factory=dict)
    duals: Dict[str, Any] = field(default_factory=dict)
    backend: str = ""
    tolerance: float = 0.0
    retried: bool = False
    iterations: int = 0
    inaccurate: bool = False

    @property
    def is_optimal(self) -> bool:
        return self.status == SolveStatus.OPTIMAL

    def require_optimal(self, context: str) -> "SdpSolution":
        """Return self, or raise SolverFailureError with diagnostics"""
        if not self.is_optimal:
            raise SolverFailureError(
                f"{context}: solver finished with status {self.status.value}",
                diagnostics={"status": self.status.value, "backend": self.backend,
                             "tolerance": self.tolerance, "retried": self.retried,
                             "gap": self.gap, "inaccurate": self.inaccurate},
            )
        return self


class SdpProblem:
    """
    Semidefinite program over Hermitian and scalar blocks.

    Constraints are named; equalities take (lhs, rhs) pairs, matrix
    inequalities take an embedded affine expression that must be PSD, scalar
    inequalities an expression that must be nonnegative.
    """

    def __init__(self, name: str):
        self.name = name
        self.blocks: Dict[str, Block] = {}
        self.equalities: Dict[str, Any] = {}
        self.lmis: Dict[str, Any] = {}
        self.inequalities: Dict[str, Any] = {}
        self.sense: Optional[ObjectiveSense] = None
        self.objective = None
        self._compiled = None
        self._constraint_index: Dict[str, List[Any]] = {}

    # -- declaration -------------------------------------------------------

    def _register(self, block: Block) -> Block:
        if block.name in self.blocks:
            raise DomainError(f"Duplicate block name {block.name} in {self.name}")
        self.blocks[block.name] = block
        self._compiled = None
        return block

    def add_psd(self, name: str, dim: int) -> HermitianBlock:
        return self._register(HermitianBlock(name, dim, psd=True))

    def add_hermitian(self, name: str, dim: int) -> HermitianBlock:
        return self._register(HermitianBlock(name, dim, psd=False))

    def add_scalar(self, name: str, nonneg: bool = False) -> ScalarBlock:
        return self._register(ScalarBlock(name, nonneg))

    def add_equality(self, name: str, lhs, rhs=0.0):
        """lhs == rhs; matrix sides are in embedded form"""
        self._check_references(name, lhs)
        self.equalities[name] = (lhs, rhs)
        self._compiled = None

    def add_lmi(self, name: str, expression):
        """expression >> 0 for an embedded (2d x 2d) affine expression"""
        self._check_references(name, expression)
        self.lmis[name] = expression
        self._compiled = None

    def add_inequality(self, name: str, expression):
        """Scalar (or elementwise) expression >= 0"""
        self._check_references(name, expression)
        self.inequalities[name] = expression
        self._compiled = None

    def minimize(self, expression):
        self._check_references("objective", expression)
        self.sense, self.objective = ObjectiveSense.MINIMIZE, expression
        self._compiled = None

    def maximize(self, expression):
        self._check_references("objective", expression)
        self.sense, self.objective = ObjectiveSense.MAXIMIZE, expression
        self._compiled = None

    @staticmethod
    def constant(matrix: HermitianLike) -> np.ndarray:
        return embed_hermitian(matrix)

    @staticmethod
    def identity(dim: int) -> np.ndarray:
        return np.eye(2 * dim)

    def _check_references(self, name: str, expression):
        if not isinstance(expression, cp.Expression):
            return
        declared = {id(b.variable) for b in self.blocks.values()}
        for variable in expression.variables():
            if id(variable) not in declared:
                raise DomainError(f"Constraint {name} in {self.name} references undeclared variable {variable.name()}")

    # -- structure ---------------------------------------------------------

    @property
    def psd_block_count(self) -> int:
        return sum(1 for b in self.blocks.values() if isinstance(b, HermitianBlock) and b.psd)

    @property
    def free_block_count(self) -> int:
        return sum(1 for b in self.blocks.values() if isinstance(b, HermitianBlock) and not b.psd)

    @property
    def lmi_count(self) -> int:
        return len(self.lmis)

    @property
    def equality_count(self) -> int:
        return len(self.equalities)

    def build(self):
        """Compile into a cvxpy.Problem (cached until the model changes)"""
        if self.objective is None:
            raise DomainError(f"Problem {self.name} has no objective")

        if self._compiled is not None:
            return self._compiled

        constraints = []
        index: Dict[str, List[Any]] = {}
        for block in self.blocks.values():
            if isinstance(block, HermitianBlock):
                structure = block.structure_constraints()
                constraints.extend(structure)
                if block.psd:
                    cone = block.variable >> 0
                    constraints.append(cone)
                    index[f"psd:{block.name}"] = [cone]

        for name, (lhs, rhs) in self.equalities.items():
            constraint = lhs == rhs
            constraints.append(constraint)
            index[f"eq:{name}"] = [constraint]

        for name, expression in self.lmis.items():
            constraint = expression >> 0
            constraints.append(constraint)
            index[f"lmi:{name}"] = [constraint]

        for name, expression in self.inequalities.items():
            constraint = expression >= 0
            constraints.append(constraint)
            index[f"ineq:{name}"] = [constraint]

        objective = cp.Minimize(self.objective) if self.sense == ObjectiveSense.MINIMIZE \
            else cp.Maximize(self.objective)
        self._compiled = cp.Problem(objective, constraints)
        self._constraint_index = index
        return self._compiled

    # -- feasibility checking ----------------------------------------------

    def constraint_margins(self, point: Dict[str, Any]) -> Dict[str, float]:
        """
        Assign trial values to the blocks and measure every constraint.

        Returns a margin per constraint: the smallest eigenvalue for PSD blocks
        and matrix inequalities (positive means strictly inside), the negated
        largest absolute residual for equalities (zero means satisfied).
        """
        self.build()
        for name, value in point.items():
            self.blocks[name].assign(value)

        margins: Dict[str, float] = {}
        for block in self.blocks.values():
            if isinstance(block, HermitianBlock) and block.psd:
                margins[f"psd:{block.name}"] = float(np.linalg.eigvalsh(block.variable.value)[0])
        for name, (lhs, rhs) in self.equalities.items():
            residual = np.asarray(_value_of(lhs) - _value_of(rhs))
            margins[f"eq:{name}"] = -float(np.max(np.abs(residual)))
        for name, expression in self.lmis.items():
            value = np.asarray(expression.value, dtype=float)
            margins[f"lmi:{name}"] = float(np.linalg.eigvalsh((value + value.T) / 2)[0])
        for name, expression in self.inequalities.items():
            margins[f"ineq:{name}"] = float(np.min(np.asarray(expression.value, dtype=float)))
        return margins

    def is_strictly_feasible(self, point: Dict[str, Any], eq_tol: float = 1e-9) -> bool:
        """Every cone margin strictly positive and every equality satisfied within eq_tol"""
        margins = self.constraint_margins(point)
        for name, margin in margins.items():
            if name.startswith("eq:"):
                if margin < -eq_tol:
                    return False
            elif margin <= 0:
                return False
        return True

    # -- debug dump --------------------------------------------------------

    def to_dict(self, backend_name: Optional[str] = None) -> Dict[str, Any]:
        """Describe the blocks and constraints plus the backend standard form (c, A, b, cones)"""
        problem = self.build()
        payload: Dict[str, Any] = {
            "name": self.name,
            "sense": self.sense.value if self.sense else None,
            "blocks": [
                {"name": b.name, "dim": b.dim,
                 "cone": "psd" if b.psd else ("nonneg" if getattr(b, "nonneg", False) else "free"),
                 "kind": "hermitian" if isinstance(b, HermitianBlock) else "scalar"}
                for b in self.blocks.values()
            ],
            "equalities": sorted(self.equalities),
            "lmis": sorted(self.lmis),
            "inequalities": sorted(self.inequalities),
        }

        backend_name = backend_name or select_backend().solver_name
        data, _, _ = problem.get_problem_data(backend_name)
        matrix = data["A"].tocoo()
        dims = data["dims"]
        payload["standard_form"] = {
            "backend": backend_name,
            "c": np.asarray(data["c"]).tolist(),
            "b": np.asarray(data["b"]).tolist(),
            "A": {"shape": list(matrix.shape), "row": matrix.row.tolist(),
                  "col": matrix.col.tolist(), "data": matrix.data.tolist()},
            "cones": {"zero": int(getattr(dims, "zero", 0)),
                      "nonneg": int(getattr(dims, "nonneg", 0)),
                      "soc": [int(s) for s in getattr(dims, "soc", [])],
                      "psd": [int(s) for s in getattr(dims, "psd", [])]},
        }
        return payload

    def dump_json(self, filepath: str, backend_name: Optional[str] = None):
        with open(filepath, "w") as f:
            json.dump(self.to_dict(backend_name), f, indent=2)

    def __str__(self):
        return (f"SdpProblem({self.name}: {self.psd_block_count} PSD, {self.free_block_count} free, "
                f"{self.lmi_count} LMI, {self.equality_count} equalities)")


def _value_of(item):
    if isinstance(item, cp.Expression):
        return item.value
    return item


def _raw_gap(raw: Any) -> float:
    """Primal/dual objective gap reported by the backend's raw result"""
    if hasattr(raw, "obj_val") and hasattr(raw, "obj_val_dual"):
        return abs(float(raw.obj_val) - float(raw.obj_val_dual))
    if isinstance(raw, dict) and "info" in raw:
        info = raw["info"]
        if "pobj" in info and "dobj" in info:
            return abs(float(info["pobj"]) - float(info["dobj"]))
        if "gap" in info:
            return abs(float(info["gap"]))
    return float("nan")


def _raw_iterations(raw: Any) -> int:
    if hasattr(raw, "iterations"):
        return int(raw.iterations)
    if isinstance(raw, dict) and "info" in raw:
        return int(raw["info"].get("iter", 0))
    return 0


class CvxpyConicBackend(SolverBackend):
    """Conic backend driving an installed cvxpy solver through its standard form"""

    def __init__(self, solver_name: str):
        super().__init__()
        self.solver_name = solver_name.upper()
        self.name = f"cvxpy/{self.solver_name}"

    def is_available(self) -> bool:
        return CVXPY_AVAILABLE and self.solver_name in cp.installed_solvers()

    def _options(self, tol: float, max_iterations: int) -> Dict[str, Any]:
        if self.solver_name == "CLARABEL":
            return {"tol_gap_abs": tol, "tol_gap_rel": tol, "tol_feas": tol,
                    "max_iter": max_iterations}
        if self.solver_name == "SCS":
            return {"eps_abs": tol, "eps_rel": tol, "max_iters": max(max_iterations * 200, 20000)}
        return {}

    def solve(self, problem, tol: float, max_iterations: int) -> BackendOutcome:
        try:
            data, chain, inverse_data = problem.get_problem_data(self.solver_name)
            raw = chain.solve_via_data(problem, data, warm_start=False, verbose=False,
                                       solver_opts=self._options(tol, max_iterations))
            problem.unpack_results(raw, chain, inverse_data)
        except cp.error.SolverError as e:
            return BackendOutcome(status="solver_error", objective=float("nan"),
                                  gap=float("nan"), message=str(e))

        objective = float(problem.value) if problem.value is not None else float("nan")
        return BackendOutcome(status=str(problem.status), objective=objective,
                              gap=_raw_gap(raw), iterations=_raw_iterations(raw))


def detect_available_backends() -> Dict[str, bool]:
    """Which of the preferred backends are installed"""
    return {name: CvxpyConicBackend(name).is_available() for name in BACKEND_PREFERENCE}


def select_backend(preferred: str = "auto", logger: Optional[OptimizationLogger] = None) -> CvxpyConicBackend:
    """First available backend, honouring an explicit preference when installed"""
    logger = logger or get_logger()
    available = [name for name, ok in detect_available_backends().items() if ok]
    if not available:
        raise SolverFailureError("No conic backend available; install clarabel or scs",
                                 diagnostics={"preference": BACKEND_PREFERENCE})

    preferred = (preferred or "auto").upper()
    if preferred != "AUTO":
        if preferred in available:
            return CvxpyConicBackend(preferred)
        logger.logger.warning(f"Preferred solver {preferred} not available, using {available[0]}")
    return CvxpyConicBackend(available[0])


def fallback_backends(primary: SolverBackend) -> List["CvxpyConicBackend"]:
    """Installed backends after the primary one, in preference order"""
    return [CvxpyConicBackend(name) for name, ok in detect_available_backends().items()
            if ok and name != getattr(primary, "solver_name", None)]


def _classify(outcome: BackendOutcome, tol: float) -> Optional[str]:
    """Reason the outcome counts as a numerical failure, or None"""
    if outcome.status in _FAILURE_STATUSES:
        return outcome.status
    if outcome.status == "optimal":
        if not np.isfinite(outcome.objective):
            return "non-finite objective"
        if np.isfinite(outcome.gap) and outcome.gap > tol * (1.0 + abs(outcome.objective)):
            return f"gap {outcome.gap:.2e} above tolerance"
    return None


def _within_gap(outcome: BackendOutcome, tol: float) -> bool:
    """An inaccurate stop whose reported gap still meets tol"""
    return (outcome.status == "optimal_inaccurate" and np.isfinite(outcome.objective)
            and np.isfinite(outcome.gap) and outcome.gap <= tol * (1.0 + abs(outcome.objective)))


def solve(problem: SdpProblem, tol: Optional[float] = None,
          config: Optional[OptimizationConfig] = None,
          backend: Optional[SolverBackend] = None,
          logger: Optional[OptimizationLogger] = None,
          fallbacks: Optional[Sequence[SolverBackend]] = None) -> SdpSolution:
    """
    Solve an SdpProblem

    A numerical failure (inaccurate status, solver error or a duality gap above
    tol * (1 + |objective|)) triggers one retry with the tolerance loosened by
    config.retry_factor, then one attempt on each fallback backend at the
    loosened tolerance. If the last attempt stops inaccurate with a reported gap
    inside the loosened tolerance, it is accepted and flagged inaccurate.
    Infeasible and unbounded outcomes are returned in the status, never raised.

    Args:
        problem: The model to solve
        tol: Solver tolerance (defaults to config.solver_tol)
        config: Optimization configuration
        backend: Explicit backend (defaults to the preferred available one)
        logger: Logger receiving solve statistics
        fallbacks: Backends tried after the retry; defaults to the other
            installed backends when backend is not given, none otherwise

    Returns:
        SdpSolution with block values (HermitianMatrix / float) and duals
    """
    config = config or OptimizationConfig()
    logger = logger or get_logger()
    tol = tol or config.solver_tol
    if backend is None:
        backend = select_backend(config.preferred_solver, logger)
        if fallbacks is None:
            fallbacks = fallback_backends(backend)
    fallbacks = list(fallbacks or [])

    compiled = problem.build()
    if config.problem_dump_dir:
        dump_dir = Path(config.problem_dump_dir)
        dump_dir.mkdir(parents=True, exist_ok=True)
        problem.dump_json(str(dump_dir / f"{problem.name}.json"),
                          getattr(backend, "solver_name", None))

    loosened = tol * config.retry_factor
    attempts = [(backend, tol), (backend, loosened)] + [(other, loosened) for other in fallbacks]
    reason = None
    for index, (active, used_tol) in enumerate(attempts):
        if index:
            logger.log_retry(problem.name, active.name, reason, used_tol)
        outcome = active.solve(compiled, used_tol, config.max_solver_iterations)
        reason = _classify(outcome, used_tol)
        if reason is None:
            break
    retried = index > 0

    inaccurate = reason is not None and _within_gap(outcome, used_tol)
    if inaccurate:
        logger.logger.warning(f"Solve {problem.name} on {active.name}: accepting inaccurate stop "
                              f"(gap {outcome.gap:.2e} within tol {used_tol:.1e})")
        status = SolveStatus.OPTIMAL
    elif reason is not None:
        status = SolveStatus.NUMERICAL_FAILURE
    elif outcome.status == "optimal":
        status = SolveStatus.OPTIMAL
    elif outcome.status == "infeasible":
        status = SolveStatus.INFEASIBLE
    elif outcome.status == "unbounded":
        status = SolveStatus.UNBOUNDED
    else:
        status = SolveStatus.NUMERICAL_FAILURE

    logger.log_solve(problem.name, active.name, used_tol, status.value,
                     outcome.objective, outcome.gap, retried)

    values: Dict[str, Any] = {}
    duals: Dict[str, Any] = {}
    if status == SolveStatus.OPTIMAL:
        values = {name: block.value() for name, block in problem.blocks.items()}
        for key, constraints in problem._constraint_index.items():
            dual = constraints[0].dual_value
            if dual is not None:
                duals[key] = np.asarray(dual)

    return SdpSolution(
        status=status,
        objective_value=outcome.objective,
        gap=outcome.gap,
        values=values,
        duals=duals,
        backend=active.name,
        tolerance=used_tol,
        retried=retried,
        iterations=outcome.iterations,
        inaccurate=inaccurate,
    )

"""
Core models for Outcome Optimizer

Immutable domain types shared by every module: Hermitian operators, POVMs,
state ensembles, measurement assemblages, and the optimization configuration.
All operators are stored as read-only complex128 numpy arrays.
"""

from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import InvariantViolationError
from .validators import (
    DEFAULT_IDENTITY_TOL,
    DEFAULT_PSD_TOL,
    validate_hermitian,
    validate_identity_sum,
    validate_psd,
    validate_same_dimension,
    validate_unit_trace,
)


def _freeze(array: np.ndarray) -> np.ndarray:
    frozen = np.array(array, dtype=np.complex128, copy=True)
    frozen.flags.writeable = False
    return frozen


def _hermitian_part(array) -> np.ndarray:
    matrix = np.asarray(array, dtype=np.complex128)
    return (matrix + matrix.conj().T) / 2


def _clamp_negative_eigenvalues(matrix: np.ndarray, tol: float, label: str) -> np.ndarray:
    """Set eigenvalues in [-tol, 0) to zero; anything below -tol is an error"""
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)
    if eigenvalues[0] >= 0:
        return matrix
    if eigenvalues[0] < -tol:
        raise InvariantViolationError(
            f"{label} has eigenvalue {eigenvalues[0]:.3e} below -{tol:.1e}, cannot sanitize"
        )
    eigenvalues = np.clip(eigenvalues, 0.0, None)
    return _hermitian_part((eigenvectors * eigenvalues) @ eigenvectors.conj().T)


def _inverse_sqrt(matrix: np.ndarray) -> np.ndarray:
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)
    if eigenvalues[0] <= 0:
        raise InvariantViolationError("cannot normalize: effect sum is singular")
    return (eigenvectors / np.sqrt(eigenvalues)) @ eigenvectors.conj().T


@dataclass
class OptimizationConfig:
    """Tolerances and solver settings shared by all algorithms"""
    solver_tol: float = 1e-8
    psd_tol: float = DEFAULT_PSD_TOL
    identity_tol: float = DEFAULT_IDENTITY_TOL
    simulability_threshold: float = 1e-7
    gap_tol: float = 1e-6
    result_psd_tol: float = 1e-8
    retry_factor: float = 10.0
    preferred_solver: str = "auto"
    max_solver_iterations: int = 500
    jobs: int = 1
    problem_dump_dir: Optional[str] = None

    @classmethod
    def for_tolerance(cls, solver_tol: float, **overrides: Any) -> "OptimizationConfig":
        """
        Config for a solver tolerance looser than the default

        gap_tol, simulability_threshold and result_psd_tol grow by the same
        factor as solver_tol over its default; a tighter solver_tol leaves
        them at their defaults.
        """
        defaults = cls()
        scale = max(1.0, solver_tol / defaults.solver_tol) if solver_tol > 0 else 1.0
        thresholds = {
            "gap_tol": defaults.gap_tol * scale,
            "simulability_threshold": defaults.simulability_threshold * scale,
            "result_psd_tol": defaults.result_psd_tol * scale,
        }
        thresholds.update(overrides)
        return cls(solver_tol=solver_tol, **thresholds)

    def validate(self) -> List[str]:
        """Validate configuration"""
        issues = []

        for name in ("solver_tol", "psd_tol", "identity_tol", "simulability_threshold",
                     "gap_tol", "result_psd_tol"):
            if getattr(self, name) <= 0:
                issues.append(f"{name} must be positive")

        if self.retry_factor < 1:
            issues.append("retry_factor must be at least 1")

        if self.preferred_solver.upper() not in ("AUTO", "CLARABEL", "SCS"):
            issues.append(f"Unknown solver: {self.preferred_solver}")

        if self.max_solver_iterations <= 0:
            issues.append("max_solver_iterations must be positive")

        if self.jobs == 0:
            issues.append("jobs must be nonzero (use -1 for all cores)")

        return issues

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization"""
        return {
            "solver_tol": self.solver_tol,
            "psd_tol": self.psd_tol,
            "identity_tol": self.identity_tol,
            "simulability_threshold": self.simulability_threshold,
            "gap_tol": self.gap_tol,
            "result_psd_tol": self.result_psd_tol,
            "retry_factor": self.retry_factor,
            "preferred_solver": self.preferred_solver,
            "max_solver_iterations": self.max_solver_iterations,
            "jobs": self.jobs,
        }


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """Complex d x d Hermitian operator"""
    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", _freeze(validate_hermitian(self.data, label="HermitianMatrix")))

    @classmethod
    def hermitize(cls, array) -> "HermitianMatrix":
        """Build from the Hermitian part (A + A^dagger)/2 of an almost-Hermitian array"""
        return cls(_hermitian_part(array))

    @classmethod
    def identity(cls, dim: int) -> "HermitianMatrix":
        return cls(np.eye(dim))

    @classmethod
    def zero(cls, dim: int) -> "HermitianMatrix":
        return cls(np.zeros((dim, dim)))

    @classmethod
    def projector(cls, vector) -> "HermitianMatrix":
        """Rank-one projector |v><v| onto the normalized vector"""
        vec = np.asarray(vector, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise InvariantViolationError("Cannot build a projector from the zero vector")
        vec = vec / norm
        return cls.hermitize(np.outer(vec, vec.conj()))

    @classmethod
    def basis_projector(cls, dim: int, index: int) -> "HermitianMatrix":
        data = np.zeros((dim, dim))
        data[index, index] = 1.0
        return cls(data)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def re(self) -> np.ndarray:
        return self.data.real

    @property
    def im(self) -> np.ndarray:
        return self.data.imag

    @property
    def trace(self) -> float:
        return float(np.trace(self.data).real)

    def inner(self, other: "HermitianMatrix") -> float:
        """Real Hilbert-Schmidt product tr(self . other)"""
        return float(np.trace(self.data @ other.data).real)

    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        return HermitianMatrix(self.data + other.data)

    def __sub__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        return HermitianMatrix(self.data - other.data)

    def __mul__(self, scalar: float) -> "HermitianMatrix":
        return HermitianMatrix(self.data * float(scalar))

    __rmul__ = __mul__

    def allclose(self, other: "HermitianMatrix", atol: float = 1e-9) -> bool:
        return self.dim == other.dim and bool(np.allclose(self.data, other.data, atol=atol, rtol=0))

    def to_dict(self) -> Dict[str, Any]:
        """Serialize as {"dim", "re", "im"}, row-major"""
        return {
            "dim": self.dim,
            "re": self.re.tolist(),
            "im": self.im.tolist(),
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "HermitianMatrix":
        re = np.asarray(payload["re"], dtype=float)
        im = np.asarray(payload.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape or re.shape != (payload["dim"], payload["dim"]):
            raise InvariantViolationError(
                f"Matrix payload shape mismatch: dim={payload['dim']}, re {re.shape}, im {im.shape}"
            )
        return cls(re + 1j * im)

    def __str__(self):
        return f"HermitianMatrix(dim={self.dim}, trace={self.trace:.6g})"


def _as_hermitian(item) -> HermitianMatrix:
    return item if isinstance(item, HermitianMatrix) else HermitianMatrix(item)


@dataclass(frozen=True, eq=False)
class Povm:
    """Ordered list of PSD effects summing to the identity. Zero effects are allowed."""
    effects: Tuple[HermitianMatrix, ...]
    psd_tol: float = DEFAULT_PSD_TOL
    identity_tol: float = DEFAULT_IDENTITY_TOL

    def __post_init__(self):
        effects = tuple(_as_hermitian(e) for e in self.effects)
        object.__setattr__(self, "effects", effects)

        arrays = [e.data for e in effects]
        validate_same_dimension(arrays, label="POVM effects")
        for index, array in enumerate(arrays):
            validate_psd(array, self.psd_tol, label=f"POVM effect {index}")
        validate_identity_sum(arrays, self.identity_tol, label="POVM effects")

    @classmethod
    def from_arrays(cls, arrays: Iterable, psd_tol: float = DEFAULT_PSD_TOL,
                    identity_tol: float = DEFAULT_IDENTITY_TOL) -> "Povm":
        return cls(tuple(HermitianMatrix(a) for a in arrays), psd_tol, identity_tol)

    @classmethod
    def sanitize(cls, arrays: Iterable, tol: float = 1e-8,
                 identity_tol: float = DEFAULT_IDENTITY_TOL) -> "Povm":
        """
        Build a POVM from slightly inexact effects (solver output).

        Takes the Hermitian part, clamps eigenvalues in [-tol, 0) to zero and,
        if the sum is off by more than identity_tol, conjugates every effect by
        S^(-1/2) with S the effect sum.
        """
        matrices = [_clamp_negative_eigenvalues(_hermitian_part(a), tol, f"effect {i}")
                    for i, a in enumerate(arrays)]
        total = sum(matrices)
        dim = total.shape[0]
        if np.max(np.abs(total - np.eye(dim))) > identity_tol:
            s_inv = _inverse_sqrt(_hermitian_part(total))
            matrices = [_hermitian_part(s_inv @ m @ s_inv) for m in matrices]
        return cls(tuple(HermitianMatrix(m) for m in matrices), identity_tol=identity_tol)

    @classmethod
    def trivial(cls, dim: int, m: int = 1) -> "Povm":
        """The single-outcome POVM {I}, zero-padded to m outcomes"""
        effects = [HermitianMatrix.identity(dim)] + [HermitianMatrix.zero(dim)] * (m - 1)
        return cls(tuple(effects))

    @property
    def dim(self) -> int:
        return self.effects[0].dim

    @property
    def outcome_count(self) -> int:
        return len(self.effects)

    def __len__(self) -> int:
        return len(self.effects)

    def arrays(self) -> List[np.ndarray]:
        return [e.data for e in self.effects]

    def padded(self, m: int) -> "Povm":
        """Append zero effects up to m outcomes"""
        if m < self.outcome_count:
            raise InvariantViolationError(f"Cannot pad a {self.outcome_count}-outcome POVM to {m}")
        zeros = [HermitianMatrix.zero(self.dim)] * (m - self.outcome_count)
        return Povm(self.effects + tuple(zeros), self.psd_tol, self.identity_tol)

    def permuted(self, order: Sequence[int]) -> "Povm":
        """Relabel outcomes: new effect b is old effect order[b]"""
        if sorted(order) != list(range(self.outcome_count)):
            raise InvariantViolationError(f"Not a permutation of the outcomes: {list(order)}")
        return Povm(tuple(self.effects[i] for i in order), self.psd_tol, self.identity_tol)

    def mix(self, other: "Povm", weight: float) -> "Povm":
        """Convex combination weight*self + (1-weight)*other"""
        if other.outcome_count != self.outcome_count or other.dim != self.dim:
            raise InvariantViolationError("Cannot mix POVMs of different shape")
        return Povm(tuple(HermitianMatrix(weight * a.data + (1 - weight) * b.data)
                          for a, b in zip(self.effects, other.effects)),
                    self.psd_tol, self.identity_tol)

    def to_dict(self) -> Dict[str, Any]:
        return {"dim": self.dim, "effects": [e.to_dict() for e in self.effects]}

    @classmethod
    def from_dict(cls, payload: Dict[str, Any], psd_tol: float = DEFAULT_PSD_TOL,
                  identity_tol: float = DEFAULT_IDENTITY_TOL) -> "Povm":
        effects = tuple(HermitianMatrix.from_dict(e) for e in payload["effects"])
        if any(e.dim != payload["dim"] for e in effects):
            raise InvariantViolationError("POVM effect dimension does not match declared dim")
        return cls(effects, psd_tol, identity_tol)

    def __str__(self):
        return f"Povm(dim={self.dim}, outcomes={self.outcome_count})"


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Subnormalized density operators with the priors absorbed: sum of traces is one"""
    states: Tuple[HermitianMatrix, ...]
    psd_tol: float = DEFAULT_PSD_TOL
    identity_tol: float = DEFAULT_IDENTITY_TOL

    def __post_init__(self):
        states = tuple(_as_hermitian(s) for s in self.states)
        object.__setattr__(self, "states", states)

        arrays = [s.data for s in states]
        validate_same_dimension(arrays, label="Ensemble states")
        for index, array in enumerate(arrays):
            validate_psd(array, self.psd_tol, label=f"Ensemble state {index}")
        validate_unit_trace(arrays, self.identity_tol, label="Ensemble states")

    @classmethod
    def from_arrays(cls, arrays: Iterable, psd_tol: float = DEFAULT_PSD_TOL,
                    identity_tol: float = DEFAULT_IDENTITY_TOL) -> "Ensemble":
        return cls(tuple(HermitianMatrix(a) for a in arrays), psd_tol, identity_tol)

    @classmethod
    def from_preparations(cls, priors: Sequence[float], states: Sequence) -> "Ensemble":
        """Absorb priors p(x) into normalized states rho_x"""
        if len(priors) != len(states):
            raise InvariantViolationError("priors and states differ in length")
        return cls(tuple(HermitianMatrix(p * _as_hermitian(s).data) for p, s in zip(priors, states)))

    @classmethod
    def sanitize(cls, arrays: Iterable, tol: float = 1e-8) -> "Ensemble":
        """Clamp eigenvalues in [-tol, 0) and rescale to unit total trace"""
        matrices = [_clamp_negative_eigenvalues(_hermitian_part(a), tol, f"state {i}")
                    for i, a in enumerate(arrays)]
        total = float(sum(np.trace(m).real for m in matrices))
        if total <= 0:
            raise InvariantViolationError("Ensemble has zero total trace")
        return cls(tuple(HermitianMatrix(m / total) for m in matrices))

    @property
    def dim(self) -> int:
        return self.states[0].dim

    @property
    def size(self) -> int:
        return len(self.states)

    def __len__(self) -> int:
        return len(self.states)

    @property
    def priors(self) -> List[float]:
        return [s.trace for s in self.states]

    def arrays(self) -> List[np.ndarray]:
        return [s.data for s in self.states]

    def preparations(self) -> List[Tuple[float, HermitianMatrix]]:
        """Split into (p(x), rho_x); zero-mass states keep a maximally mixed placeholder"""
        preps = []
        for state in self.states:
            p = state.trace
            if p > 0:
                preps.append((p, HermitianMatrix(state.data / p)))
            else:
                preps.append((0.0, HermitianMatrix(np.eye(self.dim) / self.dim)))
        return preps

    def to_dict(self) -> Dict[str, Any]:
        return {"dim": self.dim, "states": [s.to_dict() for s in self.states]}

    @classmethod
    def from_dict(cls, payload: Dict[str, Any], psd_tol: float = DEFAULT_PSD_TOL,
                  identity_tol: float = DEFAULT_IDENTITY_TOL) -> "Ensemble":
        states = tuple(HermitianMatrix.from_dict(s) for s in payload["states"])
        if any(s.dim != payload["dim"] for s in states):
            raise InvariantViolationError("Ensemble state dimension does not match declared dim")
        return cls(states, psd_tol, identity_tol)

    def __str__(self):
        return f"Ensemble(dim={self.dim}, states={self.size})"


@dataclass(frozen=True, eq=False)
class MeasurementAssemblage:
    """Family of POVMs M_{b|y} indexed by the setting y"""
    settings: Tuple[Povm, ...]

    def __post_init__(self):
        settings = tuple(self.settings)
        object.__setattr__(self, "settings", settings)
        if not settings:
            raise InvariantViolationError("Assemblage needs at least one setting")
        dims = {p.dim for p in settings}
        if len(dims) != 1:
            raise InvariantViolationError(f"Assemblage settings have mixed dimensions: {sorted(dims)}")

    @property
    def dim(self) -> int:
        return self.settings[0].dim

    @property
    def setting_count(self) -> int:
        return len(self.settings)

    @property
    def outcome_counts(self) -> List[int]:
        return [p.outcome_count for p in self.settings]

    def to_dict(self) -> Dict[str, Any]:
        return {"dim": self.dim, "settings": [p.to_dict() for p in self.settings]}

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "MeasurementAssemblage":
        return cls(tuple(Povm.from_dict(p) for p in payload["settings"]))

    def __str__(self):
        return f"MeasurementAssemblage(dim={self.dim}, settings={self.setting_count})"

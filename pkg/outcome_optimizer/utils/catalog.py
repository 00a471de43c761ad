"""
Catalog of canonical and seeded random instances

Canonical measurements (computational basis, trine, qubit SIC), the uniform
orthogonal ensemble and reproducible random POVMs, ensembles, assemblages and
simulable POVMs. Random instances draw from numpy's PCG64 bit generator seeded
with the instance seed, so identical specs give bit-identical objects.
"""

from dataclasses import dataclass, asdict
from enum import Enum
from typing import Any, Dict, List, Optional, Union

import numpy as np

from ..core.exceptions import DomainError
from ..core.models import Ensemble, HermitianMatrix, MeasurementAssemblage, Povm
from ..core.relabeling import enumerate_scheme, simulate
from .logging import log_debug

PRNG_NAME = "numpy.PCG64/v1"
MAX_REDRAWS = 16
CONDITION_LIMIT = 1e12


class InstanceKind(Enum):
    PROJECTIVE_BASIS = "projective-basis"
    TRINE = "trine"
    SIC_QUBIT = "sic-qubit"
    UNIFORM_ORTHOGONAL_ENSEMBLE = "uniform-orthogonal-ensemble"
    RANDOM_POVM = "random-povm"
    RANDOM_ENSEMBLE = "random-ensemble"


RANDOM_KINDS = {InstanceKind.RANDOM_POVM, InstanceKind.RANDOM_ENSEMBLE}
ENSEMBLE_KINDS = {InstanceKind.UNIFORM_ORTHOGONAL_ENSEMBLE, InstanceKind.RANDOM_ENSEMBLE}


@dataclass
class InstanceSpec:
    """What to build; m defaults to d where the kind allows it"""
    kind: InstanceKind
    d: int = 2
    m: Optional[int] = None
    seed: Optional[int] = None
    rank: Optional[int] = None
    prior: str = "uniform"

    def __post_init__(self):
        if isinstance(self.kind, str):
            try:
                self.kind = InstanceKind(self.kind)
            except ValueError:
                raise DomainError(f"Unknown instance kind: {self.kind}")
        if self.m is None:
            self.m = {InstanceKind.TRINE: 3, InstanceKind.SIC_QUBIT: 4}.get(self.kind, self.d)

    def validate(self) -> List[str]:
        issues = []
        if self.d < 1:
            issues.append("d must be >= 1")
        if self.m < 1:
            issues.append("m must be >= 1")

        if self.kind == InstanceKind.TRINE and (self.d, self.m) != (2, 3):
            issues.append("trine requires d=2, m=3")
        if self.kind == InstanceKind.SIC_QUBIT and (self.d, self.m) != (2, 4):
            issues.append("sic-qubit requires d=2, m=4")
        if self.kind == InstanceKind.PROJECTIVE_BASIS and self.m < self.d:
            issues.append("projective-basis requires m >= d")
        if self.kind == InstanceKind.UNIFORM_ORTHOGONAL_ENSEMBLE and self.d < self.m:
            issues.append("uniform-orthogonal-ensemble requires d >= m")

        if self.kind in RANDOM_KINDS:
            if self.seed is None:
                issues.append(f"{self.kind.value} requires a seed")
            elif not 0 <= self.seed < 2 ** 64:
                issues.append("seed must be a 64-bit unsigned integer")
        if self.rank is not None and not 1 <= self.rank <= self.d:
            issues.append("rank must lie in [1, d]")
        if self.prior not in ("uniform", "dirichlet"):
            issues.append(f"Unknown prior: {self.prior}")

        return issues

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["kind"] = self.kind.value
        if self.kind in RANDOM_KINDS:
            payload["prng"] = PRNG_NAME
        return payload


def make(spec: InstanceSpec) -> Union[Povm, Ensemble]:
    """
    Build the instance described by spec

    Raises:
        DomainError: If the instance spec is invalid for its kind
    """
    issues = spec.validate()
    if issues:
        raise DomainError(f"Invalid instance spec: {'; '.join(issues)}")

    if spec.kind == InstanceKind.PROJECTIVE_BASIS:
        return projective_basis(spec.d, spec.m)
    if spec.kind == InstanceKind.TRINE:
        return trine()
    if spec.kind == InstanceKind.SIC_QUBIT:
        return sic_qubit()
    if spec.kind == InstanceKind.UNIFORM_ORTHOGONAL_ENSEMBLE:
        return uniform_orthogonal_ensemble(spec.d, spec.m)
    if spec.kind == InstanceKind.RANDOM_POVM:
        return random_povm(spec.d, spec.m, spec.seed, spec.rank)
    return random_ensemble(spec.d, spec.m, spec.seed, spec.prior)


def projective_basis(d: int, m: Optional[int] = None) -> Povm:
    """Computational-basis projectors, zero-padded to m outcomes"""
    m = d if m is None else m
    if m < d:
        raise DomainError(f"projective-basis needs m >= d, got m={m}, d={d}")
    return Povm(tuple(HermitianMatrix.basis_projector(d, i) for i in range(d))).padded(m)


def trine() -> Povm:
    """(2/3)|psi_k><psi_k| with Bloch vectors 120 degrees apart on the x-z great circle"""
    effects = []
    for k in range(3):
        theta = 2 * np.pi * k / 3
        vector = np.array([np.cos(theta / 2), np.sin(theta / 2)])
        effects.append(HermitianMatrix.hermitize(2 / 3 * np.outer(vector, vector.conj())))
    return Povm(tuple(effects))


_PAULIS = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


def sic_qubit() -> Povm:
    """Tetrahedral qubit POVM (I + n_k . sigma) / 4"""
    bloch = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) / np.sqrt(3)
    effects = [
        HermitianMatrix.hermitize((np.eye(2) + sum(c * p for c, p in zip(vector, _PAULIS))) / 4)
        for vector in bloch
    ]
    return Povm(tuple(effects))


def uniform_orthogonal_ensemble(d: int, m: Optional[int] = None) -> Ensemble:
    """m orthogonal basis states with prior 1/m each"""
    m = d if m is None else m
    if d < m:
        raise DomainError(f"uniform-orthogonal-ensemble needs d >= m, got d={d}, m={m}")
    return Ensemble(tuple(HermitianMatrix.basis_projector(d, i) * (1 / m) for i in range(m)))


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_povm(d: int, m: int, seed: int, rank: Optional[int] = None) -> Povm:
    """
    M_b = S^(-1/2) G_b G_b^dagger S^(-1/2) with complex Gaussian G_b of shape (d, rank)
    and S = sum_b G_b G_b^dagger. An ill-conditioned S is re-drawn with seed + 1.
    """
    rank = rank or d
    for attempt in range(MAX_REDRAWS):
        rng = _generator(seed + attempt)
        products = []
        for _ in range(m):
            g = _ginibre(rng, d, rank)
            products.append(g @ g.conj().T)
        total = sum(products)
        total = (total + total.conj().T) / 2
        eigenvalues, eigenvectors = np.linalg.eigh(total)
        if eigenvalues[0] <= 0 or eigenvalues[-1] / eigenvalues[0] > CONDITION_LIMIT:
            log_debug(f"random_povm(d={d}, m={m}, seed={seed + attempt}): ill-conditioned effect sum, redrawing")
            continue
        s_inv = (eigenvectors / np.sqrt(eigenvalues)) @ eigenvectors.conj().T
        return Povm(tuple(HermitianMatrix.hermitize(s_inv @ p @ s_inv) for p in products))
    raise DomainError(f"Could not draw a nonsingular effect sum after {MAX_REDRAWS} attempts")


def random_state(rng: np.random.Generator, d: int) -> np.ndarray:
    """Normalized Wishart state G G^dagger / tr"""
    g = _ginibre(rng, d, d)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_ensemble(d: int, m: int, seed: int, prior: str = "uniform") -> Ensemble:
    """m Wishart states with uniform priors or priors drawn from a flat Dirichlet"""
    rng = _generator(seed)
    states = [random_state(rng, d) for _ in range(m)]
    if prior == "dirichlet":
        priors = rng.dirichlet(np.ones(m))
    else:
        priors = np.full(m, 1 / m)
    return Ensemble(tuple(HermitianMatrix.hermitize(p * s) for p, s in zip(priors, states)))


def random_assemblage(d: int, outcomes: List[int], seed: int) -> MeasurementAssemblage:
    """One random POVM per setting, with consecutive seeds"""
    return MeasurementAssemblage(tuple(random_povm(d, m, seed + 1000 * y) for y, m in enumerate(outcomes)))


def random_simulable_povm(d: int, m: int, n: int, seed: int) -> Povm:
    """Random mixture of relabeled random n-outcome POVMs"""
    scheme = enumerate_scheme(m, n)
    rng = _generator(seed)
    sub_povms = [random_povm(d, n, int(rng.integers(0, 2 ** 32))) for _ in range(len(scheme))]
    weights = rng.dirichlet(np.ones(len(scheme)))
    weights = weights / weights.sum()
    return simulate(scheme, sub_povms, weights)


def rank_one_random_povm(d: int, m: int, seed: int) -> Povm:
    return random_povm(d, m, seed, rank=1)

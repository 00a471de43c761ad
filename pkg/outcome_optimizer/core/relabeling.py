"""
Deterministic classical post-processing of n-outcome measurements into m outcomes

A free m-outcome POVM is written O_b = sum_{a,x} p(x) D(b|a,x) Q_{a|x} where x runs
over the increasing n-subsets of the m labels and D(b|a,x) = 1 iff b = x_a.

Only injective increasing relabelings are enumerated. Relabelings that merge
outcomes lose no generality: a merged relabeling is the same as an injective one
applied to a sub-POVM whose effects were already summed (with zero effects
filling the freed labels).

All labels are 0-based.
"""

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import List, Sequence, Tuple

import numpy as np

from .exceptions import DomainError
from .models import HermitianMatrix, Povm

Combination = Tuple[int, ...]

WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class RelabelingScheme:
    """Lexicographically ordered increasing n-subsets of range(m)"""
    m: int
    n: int
    combinations: Tuple[Combination, ...]

    def __post_init__(self):
        if not 1 <= self.n <= self.m:
            raise DomainError(f"Relabeling needs 1 <= n <= m, got n={self.n}, m={self.m}")
        if len(self.combinations) != comb(self.m, self.n):
            raise DomainError(
                f"Expected C({self.m},{self.n})={comb(self.m, self.n)} combinations, "
                f"got {len(self.combinations)}"
            )

    def __len__(self) -> int:
        return len(self.combinations)

    def index_of(self, combination: Sequence[int]) -> int:
        return self.combinations.index(tuple(combination))

    def combinations_containing(self, b: int) -> List[int]:
        """Indices of combinations in which label b appears"""
        return [i for i, x in enumerate(self.combinations) if b in x]


def enumerate_scheme(m: int, n: int) -> RelabelingScheme:
    """
    Enumerate all C(m, n) increasing combinations in lexicographic order

    Raises:
        DomainError: If n < 1 or n > m
    """
    if not 1 <= n <= m:
        raise DomainError(f"Relabeling needs 1 <= n <= m, got n={n}, m={m}")
    return RelabelingScheme(m, n, tuple(combinations(range(m), n)))


def d_value(scheme: RelabelingScheme, b: int, a: int, x: int) -> int:
    """D(b|a,x) = 1 iff b = x_a"""
    if not 0 <= b < scheme.m:
        raise DomainError(f"Outcome b={b} out of range [0, {scheme.m})")
    if not 0 <= a < scheme.n:
        raise DomainError(f"Sub-outcome a={a} out of range [0, {scheme.n})")
    if not 0 <= x < len(scheme):
        raise DomainError(f"Combination index x={x} out of range [0, {len(scheme)})")
    return int(scheme.combinations[x][a] == b)


def relabeling_matrix(scheme: RelabelingScheme) -> np.ndarray:
    """D as an array of shape (m, n, C(m,n))"""
    table = np.zeros((scheme.m, scheme.n, len(scheme)), dtype=int)
    for x, combination in enumerate(scheme.combinations):
        for a, b in enumerate(combination):
            table[b, a, x] = 1
    return table


def simulate(scheme: RelabelingScheme, sub_povms: Sequence[Povm], weights: Sequence[float]) -> Povm:
    """
    Build the free POVM O_b = sum_{a,x} p(x) D(b|a,x) Q_{a|x}

    Args:
        scheme: Relabeling scheme for (m, n)
        sub_povms: One n-outcome POVM per combination, in scheme order
        weights: Mixture distribution p(x) over combinations

    Returns:
        The simulated m-outcome POVM

    Raises:
        DomainError: On mismatched lengths, outcome counts, dimensions or an
            invalid weight distribution
    """
    if len(sub_povms) != len(scheme):
        raise DomainError(f"Need {len(scheme)} sub-POVMs, got {len(sub_povms)}")
    if len(weights) != len(scheme):
        raise DomainError(f"Need {len(scheme)} weights, got {len(weights)}")

    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > WEIGHT_TOL:
        raise DomainError(f"Weights must be a probability distribution, got sum {weights.sum():.15f}")

    dims = {p.dim for p in sub_povms}
    if len(dims) != 1:
        raise DomainError(f"Sub-POVMs have mixed dimensions: {sorted(dims)}")
    dim = dims.pop()

    for x, povm in enumerate(sub_povms):
        if povm.outcome_count != scheme.n:
            raise DomainError(f"Sub-POVM {x} has {povm.outcome_count} outcomes, expected {scheme.n}")

    effects = [np.zeros((dim, dim), dtype=np.complex128) for _ in range(scheme.m)]
    for x, (combination, povm, weight) in enumerate(zip(scheme.combinations, sub_povms, weights)):
        for a, b in enumerate(combination):
            effects[b] = effects[b] + weight * povm.effects[a].data

    return Povm(tuple(HermitianMatrix(e) for e in effects))

"""States of the targeting game for any local dimension d >= 2.

The computational basis A, its Fourier transform A', the intermediate
states between pairs of non-orthogonal targets, the maximally entangled pair
and the vectors Alice projects onto to steer Bob's half.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from qst_bell.models import BasisLabel, BobBasis, IntermediateGrid, OrthonormalBasis, StateVector, TargetSet
from qst_bell.quantum.linalg import conj_in_computational, inner
from qst_bell.utils.config import LinalgConfig, StatesConfig
from qst_bell.utils.errors import CapacityError, DegenerateInputError, DimensionError, DomainError, ValidationError
from qst_bell.utils.logging import get_logger

logger = get_logger("quantum.states")

_LINALG = LinalgConfig()
_STATES = StatesConfig()


def check_dimension(d: int, max_d: int = _STATES.max_d) -> int:
    """Validate the local dimension against the domain and the configured cap."""
    if d < 2:
        raise DomainError(f"local dimension must be at least 2, got {d}")
    if d > max_d:
        raise CapacityError(f"local dimension {d} exceeds the configured cap {max_d}")
    return d


def intermediate_normalizer(d: int) -> float:
    """N = 2(1 + 1/sqrt(d)) for targets drawn from A and A'."""
    return 2.0 * (1.0 + 1.0 / math.sqrt(d))


@lru_cache(maxsize=None)
def _computational(d: int) -> np.ndarray:
    vectors = np.eye(d, dtype=np.complex128)
    vectors.setflags(write=False)
    return vectors


@lru_cache(maxsize=None)
def _fourier(d: int) -> np.ndarray:
    # Row l holds omega^(k l) / sqrt(d) at position k; exponents reduced mod d
    k = np.arange(d)
    exponents = np.outer(k, k) % d
    vectors = np.exp(2j * np.pi * exponents / d) / math.sqrt(d)
    vectors.setflags(write=False)
    return vectors


def computational_basis(d: int) -> OrthonormalBasis:
    """Basis A: |a_k> has a single 1 at position k."""
    if d < 2:
        raise DomainError(f"local dimension must be at least 2, got {d}")
    return OrthonormalBasis(dim=d, vectors=_computational(d), label=BasisLabel.A)


def fourier_basis(d: int) -> OrthonormalBasis:
    """Basis A': |a'_l> = sum_k omega^(k l) |a_k> / sqrt(d), omega = exp(2 pi i / d)."""
    if d < 2:
        raise DomainError(f"local dimension must be at least 2, got {d}")
    return OrthonormalBasis(dim=d, vectors=_fourier(d), label=BasisLabel.A_PRIME)


def bob_basis(d: int, basis: BobBasis) -> OrthonormalBasis:
    return computational_basis(d) if basis is BobBasis.A else fourier_basis(d)


def basis_vector(d: int, basis: BobBasis, x: int) -> StateVector:
    if not 0 <= x < d:
        raise DomainError(f"basis index {x} out of range for d={d}")
    return bob_basis(d, basis)[x]


def intermediate(
    psi1: StateVector,
    psi2: StateVector,
    tol: float = _LINALG.normalization_tol,
) -> StateVector:
    """State lying exactly between psi1 and psi2.

    Returns (|psi1> + exp(-i phi)|psi2>) / sqrt(N) with N = 2(1 + |<psi1|psi2>|)
    and phi the phase of <psi1|psi2>; phi = 0 when the overlap vanishes. The
    overlaps <psi1|result> and exp(i phi)<psi2|result> are equal and real.

    Raises:
        DimensionError: psi1 and psi2 differ in dimension.
        ValidationError: either input is not unit-norm.
        DegenerateInputError: psi2 = -psi1, whose plain superposition vanishes.
    """
    if psi1.shape != psi2.shape:
        raise DimensionError(f"dimension mismatch: {psi1.shape[0]} vs {psi2.shape[0]}")
    for name, psi in (("psi1", psi1), ("psi2", psi2)):
        if abs(np.linalg.norm(psi) - 1.0) > tol:
            raise ValidationError(f"{name} is not unit-norm")
    if np.linalg.norm(psi1 + psi2) <= tol:
        raise DegenerateInputError("psi2 = -psi1 has no intermediate state")

    overlap = inner(psi1, psi2)
    magnitude = abs(overlap)
    phase = overlap / magnitude if magnitude > tol else 1.0
    normalizer = 2.0 * (1.0 + magnitude)
    return (psi1 + np.conj(phase) * psi2) / math.sqrt(normalizer)


def grid_intermediate(d: int, k: int, l: int) -> StateVector:
    """|m_kl> = (|a_k> + exp(-2 pi i k l / d)|a'_l>) / sqrt(N)."""
    if d < 2:
        raise DomainError(f"local dimension must be at least 2, got {d}")
    TargetSet(k, l).validate(d)
    phase = np.exp(-2j * np.pi * ((k * l) % d) / d)
    return (_computational(d)[k] + phase * _fourier(d)[l]) / math.sqrt(intermediate_normalizer(d))


def intermediate_grid(d: int) -> IntermediateGrid:
    """All |m_kl>, indexed [k, l]."""
    check_dimension(d)
    states = np.empty((d, d, d), dtype=np.complex128)
    for k in range(d):
        for l in range(d):
            states[k, l] = grid_intermediate(d, k, l)
    return IntermediateGrid(dim=d, states=states, normalizer=intermediate_normalizer(d))


def max_entangled(d: int) -> StateVector:
    """(1/sqrt(d)) sum_k |a_k> tensor |a_k>, Alice first."""
    if d < 2:
        raise DomainError(f"local dimension must be at least 2, got {d}")
    state = np.zeros(d * d, dtype=np.complex128)
    state[:: d + 1] = 1.0 / math.sqrt(d)
    return state


def max_entangled_aprime_form(d: int) -> StateVector:
    """The same state built in A': (1/sqrt(d)) sum_l |a'_l> tensor |a'_(d-l) mod d>."""
    if d < 2:
        raise DomainError(f"local dimension must be at least 2, got {d}")
    fourier = _fourier(d)
    state = np.zeros(d * d, dtype=np.complex128)
    for l in range(d):
        state += np.kron(fourier[l], fourier[(d - l) % d])
    return state / math.sqrt(d)


def steering_vector(d: int, target: TargetSet) -> StateVector:
    """Alice's projection vector that leaves Bob holding |m_kl>.

    Projecting half of the maximally entangled pair onto |v> leaves the other
    half in the computational conjugate of |v>, so Alice measures the conjugate
    of the state she wants Bob to hold. This also absorbs the l <-> (d - l)
    anticorrelation of the pair in the A' basis.
    """
    target.validate(d)
    return conj_in_computational(grid_intermediate(d, target.k, target.l))


def steering_vectors(d: int) -> np.ndarray:
    """All steering vectors stacked row-wise in TargetSet index order, shape (d*d, d)."""
    return np.array([steering_vector(d, t) for t in TargetSet.all(d)])

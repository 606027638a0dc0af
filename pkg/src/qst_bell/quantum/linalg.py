"""Dense complex linear algebra for small state spaces.

Inner products, tensor products, Born-rule probabilities and a Hermitian
eigensolver sized for dimensions up to a few dozen. Bipartite vectors are
laid out row-major with Alice's subsystem first: amplitude i*d_B + j belongs
to |i> (Alice) tensor |j> (Bob).
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from functools import partial
from typing import Any

import numpy as np
import numpy.typing as npt

from qst_bell.models import EigenDecomposition, HermitianOperator, StateVector
from qst_bell.utils.config import LinalgConfig
from qst_bell.utils.errors import CapacityError, DimensionError, ValidationError
from qst_bell.utils.logging import get_logger

logger = get_logger("quantum.linalg")

_DEFAULTS = LinalgConfig()
_TINY_PIVOT = float(np.finfo(np.float64).tiny) ** 0.5
_LARGE_THETA = 1e150


def as_state(amps: Sequence[complex] | npt.ArrayLike) -> StateVector:
    """Copy amplitudes into a finite 1-D complex128 array."""
    v = np.array(amps, dtype=np.complex128).reshape(-1)
    if v.size == 0:
        raise DimensionError("a state vector needs at least one amplitude")
    if not np.all(np.isfinite(v)):
        raise ValidationError("state amplitudes must be finite")
    return v


def norm(v: StateVector) -> float:
    return float(np.linalg.norm(v))


def normalize(v: StateVector, tol: float = _DEFAULTS.normalization_tol) -> StateVector:
    """Scale v to unit norm."""
    n = norm(v)
    if n <= tol:
        raise ValidationError(f"cannot normalize a vector of norm {n:.3e}")
    out = v / n
    if abs(norm(out) - 1.0) > tol:
        raise ValidationError("normalization drifted beyond tolerance")
    return out


def is_unit(v: StateVector, tol: float = _DEFAULTS.normalization_tol) -> bool:
    return abs(norm(v) - 1.0) <= tol


def canonical_phase(v: StateVector, tol: float = _DEFAULTS.normalization_tol) -> StateVector:
    """Rotate the global phase so the first nonzero amplitude is real and >= 0."""
    nonzero = np.flatnonzero(np.abs(v) > tol)
    if nonzero.size == 0:
        return v.copy()
    lead = v[nonzero[0]]
    return v * (abs(lead) / lead)


def _require_same_dim(u: StateVector, v: StateVector) -> None:
    if u.shape != v.shape:
        raise DimensionError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")


def inner(u: StateVector, v: StateVector) -> complex:
    """<u|v>, conjugating u."""
    _require_same_dim(u, v)
    return complex(np.vdot(u, v))


def fidelity(u: StateVector, v: StateVector) -> float:
    """Phase-invariant overlap |<u|v>|^2."""
    return abs(inner(u, v)) ** 2


def tensor(u: StateVector, v: StateVector, max_dim: int = _DEFAULTS.max_dim) -> StateVector:
    """u tensor v; the first factor varies slowest."""
    dim = u.shape[0] * v.shape[0]
    if dim > max_dim:
        raise CapacityError(f"tensor product dimension {dim} exceeds cap {max_dim}")
    return np.kron(u, v)


def conj_in_computational(v: StateVector) -> StateVector:
    """Amplitude-wise complex conjugate in the computational basis."""
    return np.conj(v)


def projector(v: StateVector) -> HermitianOperator:
    """Rank-1 projector |v><v|."""
    return np.outer(v, v.conj())


def _split(state: StateVector, dim_a: int, dim_b: int) -> npt.NDArray[np.complex128]:
    if state.shape[0] != dim_a * dim_b:
        raise DimensionError(
            f"state of dimension {state.shape[0]} does not factor as {dim_a} x {dim_b}"
        )
    return state.reshape(dim_a, dim_b)


def born_joint(state: StateVector, effect_a: StateVector, outcome_b: StateVector) -> float:
    """|<effect_a tensor outcome_b | state>|^2."""
    matrix = _split(state, effect_a.shape[0], outcome_b.shape[0])
    amplitude = effect_a.conj() @ matrix @ outcome_b.conj()
    return float(abs(amplitude) ** 2)


def project_alice(state: StateVector, effect_a: StateVector, dim_b: int) -> tuple[float, StateVector | None]:
    """Project Alice's half onto effect_a.

    Returns:
        The probability of the "yes" outcome and Bob's normalized conditional
        state, or None when that probability vanishes.
    """
    matrix = _split(state, effect_a.shape[0], dim_b)
    remote = effect_a.conj() @ matrix
    probability = float(np.vdot(remote, remote).real)
    if probability <= 0.0:
        return 0.0, None
    return probability, remote / math.sqrt(probability)


def partial_trace_bob(operator: npt.NDArray[np.complex128], dim_a: int, dim_b: int) -> npt.NDArray[np.complex128]:
    """Tr_B of an operator on the (dim_a * dim_b)-dimensional space."""
    return np.trace(operator.reshape(dim_a, dim_b, dim_a, dim_b), axis1=1, axis2=3)


def expectation(operator: HermitianOperator, state: StateVector) -> float:
    """<state|operator|state>, real part."""
    if operator.shape != (state.shape[0], state.shape[0]):
        raise DimensionError(f"operator {operator.shape} does not act on dimension {state.shape[0]}")
    return float(np.vdot(state, operator @ state).real)


def validate_hermitian(h: npt.ArrayLike, tol: float = _DEFAULTS.hermitian_tol) -> HermitianOperator:
    """Return h as a complex array after checking it is square and Hermitian."""
    matrix = np.array(h, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"operator must be square, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ValidationError("operator entries must be finite")
    deviation = float(np.max(np.abs(matrix - matrix.conj().T))) if matrix.size else 0.0
    if deviation > tol:
        raise ValidationError(f"operator is not Hermitian (max deviation {deviation:.3e} > {tol:.1e})")
    return matrix


def _off_diagonal_norm(a: npt.NDArray[np.complex128]) -> float:
    """Frobenius norm of the strictly off-diagonal part, summed directly."""
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def _rotate(a: npt.NDArray[np.complex128], v: npt.NDArray[np.complex128], p: int, q: int, floor: float) -> None:
    """Zero a[p, q] with one complex Jacobi rotation, updating a and v in place.

    The phase of a[p, q] is moved onto column q first, which leaves a real
    symmetric 2x2 pivot that the classic real rotation annihilates. Pivots
    below `floor` are left alone.
    """
    g = a[p, q]
    magnitude = abs(g)
    if magnitude <= floor:
        return
    phase = g / magnitude
    theta = (a[q, q].real - a[p, p].real) / (2.0 * magnitude)
    if abs(theta) > _LARGE_THETA:
        # theta^2 would overflow; t -> 1 / (2 theta)
        t = 0.5 / theta
    else:
        t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c

    rotation = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]], dtype=np.complex128)
    cols = [p, q]
    a[:, cols] = a[:, cols] @ rotation
    a[cols, :] = rotation.conj().T @ a[cols, :]
    v[:, cols] = v[:, cols] @ rotation

    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real


def hermitian_eigs(
    h: npt.ArrayLike,
    hermitian_tol: float = _DEFAULTS.hermitian_tol,
    jacobi_tol: float = _DEFAULTS.jacobi_tol,
    max_sweeps: int = _DEFAULTS.jacobi_max_sweeps,
    residual_tol: float = _DEFAULTS.eigen_residual_tol,
) -> EigenDecomposition:
    """Full eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    Sweeps visit every (p, q) pair with p < q until the off-diagonal Frobenius
    norm falls below jacobi_tol (scaled by the matrix norm when it exceeds 1).
    Eigenvalues are returned in descending order; each eigenvector carries the
    canonical global phase.

    Raises:
        ValidationError: Input not Hermitian, no convergence within max_sweeps,
            or an eigenpair residual above residual_tol.
    """
    matrix = validate_hermitian(h, hermitian_tol)
    # Symmetrize away rounding below the tolerance
    a = 0.5 * (matrix + matrix.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    threshold = jacobi_tol * max(1.0, float(np.linalg.norm(a)))
    # Skipped pivots leave an off-diagonal norm below threshold / n
    floor = max(threshold / max(n, 1) ** 2, _TINY_PIVOT)

    sweeps = 0
    while _off_diagonal_norm(a) > threshold:
        if sweeps >= max_sweeps:
            raise ValidationError(
                f"Jacobi eigensolver did not converge in {max_sweeps} sweeps "
                f"(off-diagonal norm {_off_diagonal_norm(a):.3e})"
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                _rotate(a, v, p, q, floor)
        sweeps += 1

    values = np.diag(a).real.copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = v[:, order]
    for i in range(n):
        vectors[:, i] = canonical_phase(vectors[:, i])

    residual = float(np.max(np.linalg.norm(matrix @ vectors - vectors * values, axis=0))) if n else 0.0
    if residual > residual_tol:
        raise ValidationError(f"eigenpair residual {residual:.3e} exceeds {residual_tol:.1e}")

    logger.debug(f"Jacobi: n={n}, sweeps={sweeps}, max residual={residual:.2e}")
    return EigenDecomposition(eigenvalues=values, eigenvectors=vectors)


def eigensolver(config: LinalgConfig | None = None) -> Callable[[npt.ArrayLike], EigenDecomposition]:
    """hermitian_eigs bound to the tolerances of a LinalgConfig."""
    config = config or _DEFAULTS
    return partial(
        hermitian_eigs,
        hermitian_tol=config.hermitian_tol,
        jacobi_tol=config.jacobi_tol,
        max_sweeps=config.jacobi_max_sweeps,
        residual_tol=config.eigen_residual_tol,
    )


def to_json_pairs(array: npt.ArrayLike) -> Any:
    """Nested lists with every complex entry written as [re, im]."""
    data = np.asarray(array, dtype=np.complex128)
    if data.ndim == 0:
        value = complex(data)
        return [value.real, value.imag]
    return [to_json_pairs(item) for item in data]

"""The Bell sum B_d built from the targeting game.

Alice holds d^2 binary measurements, one per target set (k, l), each
projecting onto the steering vector of |m_kl>; Bob measures A or A'. For
every setting pair the correlated outcome is k (Bob in A) or l (Bob in A'),
and B_d adds the correlated joint probability p(fire and Bob = correlated)
minus the anticorrelated mass. Declined rounds contribute nothing.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict

import numpy as np
import numpy.typing as npt
import pandas as pd

from qst_bell.bell.lhv import classical_bound
from qst_bell.models import (
    BellReport,
    BobBasis,
    HermitianOperator,
    JointRow,
    JointTable,
    PerturbationResult,
    SettingPair,
    StateVector,
    SweepRow,
    TargetSet,
)
from qst_bell.quantum.linalg import born_joint, eigensolver, expectation, normalize, projector
from qst_bell.quantum.states import bob_basis, check_dimension, max_entangled, steering_vector, steering_vectors
from qst_bell.utils.config import AppConfig, BellConfig, LinalgConfig
from qst_bell.utils.errors import DimensionError, DomainError, ValidationError
from qst_bell.utils.logging import get_logger
from qst_bell.utils.rng import SeededRNG

logger = get_logger("bell.inequality")

_VALUE_TOL = 1e-9


def quantum_limit(d: int) -> float:
    return 2.0 * math.sqrt(d)


def correlated_outcome(pair: SettingPair) -> int:
    """Bob's outcome that counts as agreeing with Alice's "yes" on m_kl."""
    return pair.alice.k if pair.bob is BobBasis.A else pair.alice.l


def _check_state(state: StateVector, d: int) -> None:
    if state.ndim != 1 or state.shape[0] != d * d:
        raise DimensionError(f"state of dimension {state.shape[0]} is not a {d} x {d} pair")


def joint_table(state: StateVector, d: int) -> JointTable:
    """Joint probabilities p(Alice fires m_kl and Bob gets x) for all 2 d^2 pairs."""
    check_dimension(d)
    _check_state(state, d)
    rows = []
    for pair in SettingPair.all(d):
        alice = steering_vector(d, pair.alice)
        outcomes = bob_basis(d, pair.bob)
        probabilities = tuple(born_joint(state, alice, outcomes[x]) for x in range(d))
        rows.append(JointRow(pair=pair, probabilities=probabilities, correlated_index=correlated_outcome(pair)))
    return JointTable(d=d, rows=tuple(rows))


def bell_value(state: StateVector, d: int) -> float:
    """B_d of a bipartite state under the game's measurements."""
    return joint_table(state, d).value()


def bob_correlator(d: int, target: TargetSet) -> HermitianOperator:
    """K_kl = sum over Bob's bases of sum_x s(x)|b_x><b_x|, s = +1 on the correlated outcome."""
    target.validate(d)
    k_op = np.zeros((d, d), dtype=np.complex128)
    for basis in BobBasis:
        vectors = bob_basis(d, basis)
        correlated = correlated_outcome(SettingPair(target, basis))
        for x in range(d):
            sign = 1.0 if x == correlated else -1.0
            k_op += sign * projector(vectors[x])
    return k_op


def bell_operator_for_effects(effects: npt.NDArray[np.complex128], d: int) -> HermitianOperator:
    """B = sum_kl |e_kl><e_kl| tensor K_kl for Alice vectors e_kl (rows, TargetSet order)."""
    check_dimension(d)
    if effects.shape != (d * d, d):
        raise DimensionError(f"expected {d * d} Alice vectors of dimension {d}, got shape {effects.shape}")
    operator = np.zeros((d * d, d * d), dtype=np.complex128)
    for target in TargetSet.all(d):
        operator += np.kron(projector(effects[target.index(d)]), bob_correlator(d, target))
    return operator


def bell_operator(d: int) -> HermitianOperator:
    """Bell operator of the game's own measurements; <psi|B|psi> = bell_value(psi)."""
    return bell_operator_for_effects(steering_vectors(d), d)


def exact_report(
    d: int,
    state: StateVector | None = None,
    lhv_mode: str = "auto",
    config: AppConfig | None = None,
) -> BellReport:
    """Quantum value, local bound and their ratio, with the full joint table.

    With no state given the maximally entangled pair is used and its value is
    checked against 2 sqrt(d).

    Raises:
        ValidationError: The computed value breaks an invariant.
    """
    config = config or AppConfig()
    check_dimension(d, config.states.max_d)
    reference = state is None
    if state is None:
        state = max_entangled(d)

    table = joint_table(state, d)
    quantum = table.value()
    if reference and abs(quantum - quantum_limit(d)) > _VALUE_TOL:
        raise ValidationError(f"B_{d} of the maximally entangled pair is {quantum}, expected {quantum_limit(d)}")
    if not all(0.0 <= p <= 1.0 + _VALUE_TOL for row in table.rows for p in row.probabilities):
        raise ValidationError("joint probability outside [0, 1]")

    bound = classical_bound(d, lhv_mode, config.lhv, threads=config.runtime.threads)
    classical = float(bound.max_value)
    logger.info(f"B_{d}: quantum {quantum:.10f}, classical {classical:g}, ratio {quantum / classical:.10f}")
    return BellReport(
        d=d,
        quantum_value=quantum,
        classical_bound=classical,
        violation_ratio=quantum / classical,
        table=table,
    )


def _sweep_row(d: int, lhv_mode: str, config: AppConfig) -> SweepRow:
    report = exact_report(d, lhv_mode=lhv_mode, config=config)
    return SweepRow(d=d, quantum=report.quantum_value, classical=report.classical_bound, ratio=report.violation_ratio)


def dimension_sweep(
    d_list: Sequence[int],
    lhv_mode: str = "auto",
    config: AppConfig | None = None,
    threads: int = 1,
) -> pd.DataFrame:
    """Table of (d, quantum, classical, ratio) for each dimension, in input order."""
    if not d_list:
        raise DomainError("dimension sweep needs at least one d")
    config = config or AppConfig()
    for d in d_list:
        check_dimension(d, config.states.max_d)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda d: _sweep_row(d, lhv_mode, config), d_list))
    else:
        rows = [_sweep_row(d, lhv_mode, config) for d in d_list]

    frame = pd.DataFrame([asdict(row) for row in rows], columns=["d", "quantum", "classical", "ratio"])
    for row in rows:
        if abs(row.ratio - math.sqrt(row.d)) > _VALUE_TOL:
            raise ValidationError(f"ratio {row.ratio} at d={row.d} differs from sqrt(d)")
    return frame


def check_operator_consistency(d: int, states: Sequence[StateVector], tol: float = _VALUE_TOL) -> float:
    """Largest |<psi|B|psi> - bell_value(psi)| over the given states."""
    operator = bell_operator(d)
    worst = 0.0
    for psi in states:
        worst = max(worst, abs(expectation(operator, psi) - bell_value(psi, d)))
    if worst > tol:
        raise ValidationError(f"Bell operator disagrees with the probability sum by {worst:.3e}")
    return worst


def perturbation_check(
    d: int,
    samples: int | None = None,
    scale: float | None = None,
    seed: int = 0,
    config: BellConfig | None = None,
    linalg: LinalgConfig | None = None,
) -> PerturbationResult:
    """Kick every Alice effect at random and look for a higher top eigenvalue of B.

    Each kick adds a complex Gaussian direction of norm at most `scale` and
    renormalizes, so the perturbed effects stay rank-1 projectors.
    """
    config = config or BellConfig()
    samples = config.perturbation_samples if samples is None else samples
    scale = config.perturbation_scale if scale is None else scale
    if samples < 1:
        raise DomainError(f"samples must be at least 1, got {samples}")
    if scale < 0.0:
        raise DomainError(f"scale must be nonnegative, got {scale}")

    eigs = eigensolver(linalg)
    base_effects = steering_vectors(d)
    baseline = eigs(bell_operator_for_effects(base_effects, d)).top_value
    rng = SeededRNG(seed)

    best = -math.inf
    for _ in range(samples):
        effects = np.empty_like(base_effects)
        for i, effect in enumerate(base_effects):
            direction = rng.complex_normal(d)
            kick = direction / np.linalg.norm(direction) * scale * float(rng.uniform())
            effects[i] = normalize(effect + kick)
        best = max(best, eigs(bell_operator_for_effects(effects, d)).top_value)

    ascent = best > baseline + _VALUE_TOL
    if ascent:
        logger.warning(f"Perturbed effects at d={d} reached {best:.10f} above {baseline:.10f}")
    else:
        logger.info(f"No ascent from {samples} perturbations at d={d} (best {best:.10f})")
    return PerturbationResult(
        d=d, baseline=baseline, max_perturbed=best, samples=samples, scale=scale, ascent_found=ascent
    )

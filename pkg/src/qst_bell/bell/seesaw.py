"""See-saw ascent of the Bell sum over states and Alice's effects.

Bob's bases stay fixed at A and A'. Each iteration first sets every Alice
effect to the top eigenvector of Tr_B[rho (I tensor K_kl)] for the current
state, then sets the state to the top eigenvector of the Bell operator built
from those effects. The value never decreases and is bounded by 2 sqrt(d).
"""

from __future__ import annotations

import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from qst_bell.bell.inequality import bell_operator_for_effects, bob_correlator, quantum_limit
from qst_bell.models import EigenDecomposition, SeesawResult, StateVector, TargetSet
from qst_bell.quantum.linalg import eigensolver, normalize, partial_trace_bob, projector
from qst_bell.quantum.states import check_dimension
from qst_bell.utils.config import BellConfig, LinalgConfig
from qst_bell.utils.errors import DimensionError, DomainError, ValidationError
from qst_bell.utils.logging import get_logger
from qst_bell.utils.rng import SeededRNG

logger = get_logger("bell.seesaw")

_LIMIT_SLACK = 1e-6


@dataclass(frozen=True)
class _Trial:
    value: float
    iterations: int
    converged: bool
    state: StateVector
    effects: npt.NDArray[np.complex128]


def best_effects(
    state: StateVector,
    d: int,
    eigs: Callable[[npt.ArrayLike], EigenDecomposition] | None = None,
) -> npt.NDArray[np.complex128]:
    """Alice's optimal rank-1 effects for a fixed state, rows in TargetSet order."""
    eigs = eigs or eigensolver()
    rho = projector(state)
    identity = np.eye(d, dtype=np.complex128)
    effects = np.empty((d * d, d), dtype=np.complex128)
    for target in TargetSet.all(d):
        conditional = partial_trace_bob(rho @ np.kron(identity, bob_correlator(d, target)), d, d)
        # Hermitian up to rounding
        conditional = 0.5 * (conditional + conditional.conj().T)
        effects[target.index(d)] = eigs(conditional).top_vector
    return effects


def _run_trial(
    d: int,
    state: StateVector,
    config: BellConfig,
    eigs: Callable[[npt.ArrayLike], EigenDecomposition],
    trial: int,
) -> _Trial:
    value = -math.inf
    effects = best_effects(state, d, eigs)
    for iteration in range(1, config.seesaw_max_iterations + 1):
        decomposition = eigs(bell_operator_for_effects(effects, d))
        state = decomposition.top_vector
        gain = decomposition.top_value - value
        value = decomposition.top_value
        logger.debug(f"see-saw d={d} trial {trial} iteration {iteration}: {value:.12f}")
        if gain < config.seesaw_tol:
            return _Trial(value, iteration, True, state, effects)
        effects = best_effects(state, d, eigs)

    logger.warning(f"see-saw d={d} trial {trial} hit {config.seesaw_max_iterations} iterations at {value:.12f}")
    return _Trial(value, config.seesaw_max_iterations, False, state, effects)


def seesaw_verify(
    d: int,
    trials: int | None = None,
    seed: int = 0,
    config: BellConfig | None = None,
    initial_state: StateVector | None = None,
    threads: int = 1,
    linalg: LinalgConfig | None = None,
) -> SeesawResult:
    """Best Bell value over see-saw trials from random pure states.

    With `initial_state` given, a single trial starts from it instead.

    Raises:
        ValidationError: A trial climbed above 2 sqrt(d) + 1e-6.
    """
    config = config or BellConfig()
    check_dimension(d)
    trials = config.seesaw_trials if trials is None else trials
    if trials < 1:
        raise DomainError(f"trials must be at least 1, got {trials}")
    eigs = eigensolver(linalg)

    if initial_state is not None:
        if initial_state.shape != (d * d,):
            raise DimensionError(f"initial state must have dimension {d * d}")
        starts = [normalize(initial_state)]
    else:
        starts = [normalize(child.complex_normal(d * d)) for child in SeededRNG(seed).spawn(trials)]

    def run(indexed: tuple[int, StateVector]) -> _Trial:
        return _run_trial(d, indexed[1], config, eigs, indexed[0])

    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, enumerate(starts)))
    else:
        results = [run(item) for item in enumerate(starts)]

    best = max(results, key=lambda r: r.value)
    limit = quantum_limit(d)
    if best.value > limit + _LIMIT_SLACK:
        raise ValidationError(f"see-saw reached {best.value:.12f}, above the quantum limit {limit:.12f}")

    converged = all(r.converged for r in results)
    logger.info(
        f"see-saw d={d}: best {best.value:.12f} over {len(results)} trials "
        f"(limit {limit:.12f}{'' if converged else ', some trials not converged'})"
    )
    return SeesawResult(
        d=d,
        best_value=best.value,
        trial_values=tuple(r.value for r in results),
        iterations=tuple(r.iterations for r in results),
        converged=converged,
        best_state=best.state,
        best_effects=best.effects,
    )

"""Tests for the see-saw ascent."""

import math

import numpy as np
import pytest

from qst_bell.bell.inequality import bell_value
from qst_bell.bell.seesaw import best_effects, seesaw_verify
from qst_bell.models import TargetSet
from qst_bell.quantum.linalg import fidelity
from qst_bell.quantum.states import max_entangled, steering_vector
from qst_bell.utils.config import BellConfig
from qst_bell.utils.errors import DimensionError, DomainError

SLACK = 1e-6


def test_best_effects_at_max_entangled_are_steering_vectors() -> None:
    effects = best_effects(max_entangled(3), 3)
    for target in TargetSet.all(3):
        assert fidelity(effects[target.index(3)], steering_vector(3, target)) == pytest.approx(1.0, abs=1e-10)


def test_fixed_point_from_max_entangled() -> None:
    result = seesaw_verify(3, initial_state=max_entangled(3))
    assert result.best_value == pytest.approx(2.0 * math.sqrt(3), abs=1e-9)
    assert result.iterations == (2,)
    assert result.converged


def test_seesaw_qubit() -> None:
    result = seesaw_verify(2, trials=5, seed=1)
    limit = 2.0 * math.sqrt(2)
    assert max(result.trial_values) <= limit + SLACK
    assert result.best_value == pytest.approx(limit, abs=SLACK)


def test_seesaw_qutrit_few_trials() -> None:
    result = seesaw_verify(3, trials=4, seed=2)
    limit = 2.0 * math.sqrt(3)
    assert all(value <= limit + SLACK for value in result.trial_values)
    assert result.best_value > 2.0
    assert result.best_state is not None
    assert bell_value(result.best_state, 3) <= limit + SLACK


@pytest.mark.parametrize("d", [2, 3])
def test_seesaw_twenty_trials(d: int) -> None:
    result = seesaw_verify(d, trials=20, seed=0)
    limit = 2.0 * math.sqrt(d)
    assert len(result.trial_values) == 20
    assert all(value <= limit + SLACK for value in result.trial_values)
    assert result.best_value == pytest.approx(limit, abs=SLACK)


def test_seesaw_deterministic_and_thread_independent() -> None:
    serial = seesaw_verify(2, trials=3, seed=5)
    threaded = seesaw_verify(2, trials=3, seed=5, threads=3)
    assert serial.trial_values == threaded.trial_values
    assert serial.iterations == threaded.iterations


def test_seesaw_flags_iteration_cap() -> None:
    rng = np.random.default_rng(0)
    start = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    result = seesaw_verify(3, initial_state=start, config=BellConfig(seesaw_max_iterations=1))
    assert not result.converged
    assert result.iterations == (1,)
    assert result.best_value <= 2.0 * math.sqrt(3) + SLACK


def test_seesaw_argument_errors() -> None:
    with pytest.raises(DomainError):
        seesaw_verify(3, trials=0)
    with pytest.raises(DimensionError):
        seesaw_verify(3, initial_state=max_entangled(2))

"""Tests for the targeting game."""

import math

import numpy as np
import pytest

from qst_bell.game.targeting import (
    MaxControlPolicy,
    SwappedAnnouncementPolicy,
    TargetingGame,
    control_probability,
    create_policy,
    estimate_bell_value,
    play_round,
    simulate,
    single_system_pass_probability,
)
from qst_bell.models import Announcement, BobBasis, GameRound, TargetSet, Verdict
from qst_bell.quantum.states import computational_basis, fourier_basis, intermediate
from qst_bell.utils.config import GameConfig
from qst_bell.utils.errors import CapacityError, DimensionError, DomainError, ValidationError
from qst_bell.utils.rng import SeededRNG

P_PASS_QUTRIT = 0.5 + 1.0 / (2.0 * math.sqrt(3))
# Upper 0.1% point of chi-square with 17 degrees of freedom
CHI2_17_999 = 40.79


@pytest.fixture
def game() -> TargetingGame:
    return TargetingGame(3)


# ── Control probability ─────────────────────────────────────────────────────


def test_control_probability_examples() -> None:
    a3, aprime3 = computational_basis(3), fourier_basis(3)
    assert control_probability(a3[0], aprime3[0]) == pytest.approx(0.7886751, abs=1e-7)
    assert control_probability(a3[1], a3[1]) == pytest.approx(1.0)
    assert control_probability(a3[0], a3[1]) == pytest.approx(0.5)

    a2, aprime2 = computational_basis(2), fourier_basis(2)
    assert control_probability(a2[0], aprime2[1]) == pytest.approx(0.8535534, abs=1e-7)


def test_control_probability_dimension_mismatch() -> None:
    with pytest.raises(DimensionError):
        control_probability(computational_basis(2)[0], computational_basis(3)[0])


def test_intermediate_attains_control_for_random_pairs() -> None:
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        d = int(rng.integers(2, 7))
        psi1 = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        psi2 = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        psi1 /= np.linalg.norm(psi1)
        psi2 /= np.linalg.norm(psi2)
        submitted = intermediate(psi1, psi2)
        expected = control_probability(psi1, psi2)
        assert single_system_pass_probability(submitted, psi1) == pytest.approx(expected, abs=1e-10)
        assert single_system_pass_probability(submitted, psi2) == pytest.approx(expected, abs=1e-10)


def test_single_system_without_intermediate() -> None:
    a = computational_basis(3)
    aprime = fourier_basis(3)
    # Submitting one target passes it surely and the other with probability 1/d
    assert single_system_pass_probability(a[0], a[0]) == pytest.approx(1.0)
    assert single_system_pass_probability(a[0], aprime[2]) == pytest.approx(1.0 / 3.0)


# ── Policies and rounds ─────────────────────────────────────────────────────


def test_create_policy() -> None:
    assert isinstance(create_policy("max_control"), MaxControlPolicy)
    assert isinstance(create_policy("swapped"), SwappedAnnouncementPolicy)
    with pytest.raises(ValueError, match="Unknown announcement policy"):
        create_policy("greedy")


def test_policy_announcements() -> None:
    assert MaxControlPolicy().announce(BobBasis.A_PRIME) == (Announcement.TARGET_STATE, BobBasis.A_PRIME)
    assert SwappedAnnouncementPolicy().announce(BobBasis.A) == (Announcement.NON_TARGET_STATE, BobBasis.A_PRIME)


def test_game_round_invariants() -> None:
    with pytest.raises(ValidationError):
        GameRound(TargetSet(0, 0), BobBasis.A, False, Announcement.TARGET_STATE, Verdict.PASS, 0)
    with pytest.raises(ValidationError):
        GameRound(TargetSet(0, 0), BobBasis.A, True, Announcement.TARGET_STATE, Verdict.PASS, None)
    declined = GameRound(TargetSet(0, 0), BobBasis.A, False, Announcement.DECLINED, Verdict.DECLINED)
    assert declined.outcome_label is None


def test_play_round_is_consistent(game: TargetingGame) -> None:
    rng = SeededRNG(11)
    for _ in range(200):
        round_ = game.play_round(rng)
        assert 0 <= round_.target.k < 3 and 0 <= round_.target.l < 3
        if round_.alice_fired:
            assert round_.announcement is Announcement.TARGET_STATE
            assert round_.tested_basis is round_.bob_choice
            expected = round_.target.k if round_.bob_choice is BobBasis.A else round_.target.l
            assert (round_.verdict is Verdict.PASS) == (round_.bob_outcome == expected)
            assert round_.outcome_label in ("A", "B")
        else:
            assert round_.verdict is Verdict.DECLINED
            assert round_.bob_outcome is None


def test_play_round_deterministic() -> None:
    first = [play_round(3, rng) for rng in [SeededRNG(99)] for _ in range(50)]
    rng = SeededRNG(99)
    second = [play_round(3, rng) for _ in range(50)]
    assert first == second


def test_play_rounds_matches_single_rounds(game: TargetingGame) -> None:
    batch = game.play_rounds(30, SeededRNG(5))
    rng = SeededRNG(5)
    singles = [game.play_round(rng) for _ in range(30)]
    assert batch == singles


def test_swapped_policy_rounds() -> None:
    game = TargetingGame(3, policy=SwappedAnnouncementPolicy())
    rounds = game.play_rounds(300, SeededRNG(3))
    fired = [r for r in rounds if r.alice_fired]
    assert fired
    for r in fired:
        assert r.announcement is Announcement.NON_TARGET_STATE
        assert r.tested_basis is r.bob_choice.other
        assert r.outcome_label in ("C", "D")


# ── Exact probabilities ─────────────────────────────────────────────────────


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_conditional_pass_equals_control(d: int) -> None:
    game = TargetingGame(d)
    expected = control_probability(computational_basis(d)[0], fourier_basis(d)[0])
    for target in TargetSet.all(d):
        assert game.fire_probability(target) == pytest.approx(1.0 / d, abs=1e-10)
        for choice in BobBasis:
            assert game.conditional_pass_probability(target, choice) == pytest.approx(expected, abs=1e-10)


def test_swapped_policy_pass_probability() -> None:
    game = TargetingGame(3, policy=SwappedAnnouncementPolicy())
    assert game.conditional_pass_probability(TargetSet(1, 2), BobBasis.A) == pytest.approx(P_PASS_QUTRIT)


def test_game_dimension_checks() -> None:
    with pytest.raises(DomainError):
        TargetingGame(1)
    with pytest.raises(CapacityError):
        TargetingGame(7)
    with pytest.raises(DomainError):
        TargetingGame(3, GameConfig(bob_aprime_probability=1.5))


# ── Simulation ──────────────────────────────────────────────────────────────


def test_simulate_qutrit_statistics() -> None:
    summary = simulate(3, 100_000, seed=42)

    assert summary.rounds == 100_000
    assert summary.rates_defined
    assert abs(summary.pass_rate_given_announce - P_PASS_QUTRIT) < 4.0 * summary.std_err_pass
    assert abs(summary.fire_rate - 1.0 / 3.0) < 4.0 * summary.std_err_fire
    assert summary.pass_rate_given_announce + summary.fail_rate_given_announce == pytest.approx(1.0, abs=1e-12)
    counts = summary.outcome_counts
    assert counts["A"] + counts["B"] == summary.announced
    assert counts["declined"] == summary.rounds - summary.announced


def test_simulate_is_deterministic() -> None:
    assert simulate(3, 5000, seed=7) == simulate(3, 5000, seed=7)
    assert simulate(3, 5000, seed=7) != simulate(3, 5000, seed=8)


def test_simulate_single_round() -> None:
    for seed in range(20):
        summary = simulate(3, 1, seed=seed)
        if summary.announced == 0:
            assert summary.pass_rate_given_announce is None
            assert summary.std_err_pass is None
            assert not summary.rates_defined
        else:
            assert summary.pass_rate_given_announce in (0.0, 1.0)
        assert summary.fire_rate in (0.0, 1.0)


def test_simulate_rejects_zero_rounds(game: TargetingGame) -> None:
    with pytest.raises(DomainError):
        game.simulate(0, seed=1)


def test_simulate_rejects_bad_seed(game: TargetingGame) -> None:
    with pytest.raises(DomainError):
        game.simulate(10, seed=-1)


def test_simulate_swapped_policy_counts() -> None:
    summary = simulate(3, 20_000, seed=1, policy=SwappedAnnouncementPolicy())
    assert summary.policy == "swapped"
    assert summary.outcome_counts["A"] == 0
    assert summary.outcome_counts["C"] + summary.outcome_counts["D"] == summary.announced
    assert abs(summary.pass_rate_given_announce - P_PASS_QUTRIT) < 4.0 * summary.std_err_pass


def test_pass_rate_homogeneous_across_settings(game: TargetingGame) -> None:
    """Chi-square homogeneity of pass counts over the 18 (target, Bob choice) cells."""
    batch = game.sample(200_000, SeededRNG(2024))
    cell = 2 * batch.target_index + batch.bob_aprime.astype(np.int64)
    fired = batch.fired
    passes = np.bincount(cell[fired], weights=batch.passed[fired].astype(float), minlength=18)
    totals = np.bincount(cell[fired], minlength=18).astype(float)
    fails = totals - passes

    pooled = passes.sum() / totals.sum()
    expected_pass = totals * pooled
    expected_fail = totals * (1.0 - pooled)
    chi2 = np.sum((passes - expected_pass) ** 2 / expected_pass + (fails - expected_fail) ** 2 / expected_fail)
    assert chi2 < CHI2_17_999


def test_fire_independent_of_bob_choice(game: TargetingGame) -> None:
    batch = game.sample(200_000, SeededRNG(17))
    correlation = np.corrcoef(batch.fired.astype(float), batch.bob_aprime.astype(float))[0, 1]
    assert abs(correlation) < 0.01


# ── Monte-Carlo Bell estimate ───────────────────────────────────────────────


def test_estimate_bell_value_qutrit() -> None:
    # 18 setting pairs; 1.8M rounds leaves about 10^5 rounds per pair
    estimate = estimate_bell_value(3, 1_800_000, seed=3)
    assert estimate.std_err > 0.0
    assert abs(estimate.value - 2.0 * math.sqrt(3)) < 5.0 * estimate.std_err


def test_estimate_bell_value_qubit() -> None:
    estimate = estimate_bell_value(2, 400_000, seed=8)
    assert abs(estimate.value - 2.0 * math.sqrt(2)) < 5.0 * estimate.std_err


def test_estimate_requires_max_control() -> None:
    game = TargetingGame(3, policy=SwappedAnnouncementPolicy())
    with pytest.raises(ValidationError):
        game.estimate_bell_value(1000, seed=0)


def test_estimate_requires_enough_rounds(game: TargetingGame) -> None:
    with pytest.raises(DomainError):
        game.estimate_bell_value(10, seed=0)

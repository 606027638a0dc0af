"""The quantum state targeting game played on shared entangled pairs.

One round follows the four steps of the game: Alice "submits" Bob's half by a
binary measurement on her half of the maximally entangled pair, Bob reveals
which of the two targets he chose, Alice announces a state (or declines when
her measurement said "no"), and Bob tests the announced state in its basis.

Random draw contract: every round consumes exactly four uniform doubles from
the stream, in this order, whether or not Alice fires:
    u0 -> target set index floor(u0 * d^2)
    u1 -> Alice fires iff u1 < P(fire | target)
    u2 -> Bob picks his target from A' iff u2 < bob_aprime_probability
    u3 -> Bob's outcome by inverse CDF in the tested basis
Rounds are therefore a pure function of (seed, round index).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Protocol

import numpy as np
import numpy.typing as npt

from qst_bell.models import (
    Announcement,
    BellEstimate,
    BobBasis,
    GameRound,
    GameSummary,
    StateVector,
    TargetSet,
    Verdict,
)
from qst_bell.quantum.linalg import fidelity, inner, project_alice
from qst_bell.quantum.states import bob_basis, check_dimension, max_entangled, steering_vector
from qst_bell.utils.config import GameConfig, StatesConfig
from qst_bell.utils.errors import DomainError, ValidationError
from qst_bell.utils.logging import get_logger
from qst_bell.utils.rng import SeededRNG, check_seed

logger = get_logger("game.targeting")

DRAWS_PER_ROUND = 4
_CHUNK_ROUNDS = 1 << 16
_BASES = (BobBasis.A, BobBasis.A_PRIME)


def control_probability(psi1: StateVector, psi2: StateVector) -> float:
    """Maximal control (1 + |<psi1|psi2>|) / 2, reached by the intermediate state."""
    return 0.5 * (1.0 + abs(inner(psi1, psi2)))


def single_system_pass_probability(submitted: StateVector, target: StateVector) -> float:
    """Probability that a submitted single system passes Bob's test for `target`."""
    return fidelity(target, submitted)


class AlicePolicy(Protocol):
    """What Alice announces after a "yes" outcome, given Bob's choice.

    Returns the kind of announcement and the basis of the announced state,
    which is the basis Bob tests in.
    """

    name: str

    def announce(self, bob_choice: BobBasis) -> tuple[Announcement, BobBasis]:
        ...


class MaxControlPolicy:
    """Always announce the target Bob chose (outcomes A/B)."""

    name = "max_control"

    def announce(self, bob_choice: BobBasis) -> tuple[Announcement, BobBasis]:
        return Announcement.TARGET_STATE, bob_choice


class SwappedAnnouncementPolicy:
    """Announce the other member of the target pair (outcomes C/D)."""

    name = "swapped"

    def announce(self, bob_choice: BobBasis) -> tuple[Announcement, BobBasis]:
        return Announcement.NON_TARGET_STATE, bob_choice.other


def create_policy(name: str) -> AlicePolicy:
    """Factory for the announcement policies.

    Raises:
        ValueError: If the policy name is not supported.
    """
    if name == MaxControlPolicy.name:
        return MaxControlPolicy()
    if name == SwappedAnnouncementPolicy.name:
        return SwappedAnnouncementPolicy()
    raise ValueError(f"Unknown announcement policy: {name}. Supported: max_control, swapped")


@dataclass(frozen=True)
class RoundBatch:
    """Vectorized outcome of n rounds; outcome is -1 where Alice declined."""

    target_index: npt.NDArray[np.int64]
    fired: npt.NDArray[np.bool_]
    bob_aprime: npt.NDArray[np.bool_]
    tested_aprime: npt.NDArray[np.bool_]
    outcome: npt.NDArray[np.int64]
    passed: npt.NDArray[np.bool_]

    def __len__(self) -> int:
        return int(self.fired.shape[0])


class TargetingGame:
    """Plays the targeting game at dimension d with Alice at maximum control.

    All Born probabilities are tabulated once at construction: Alice's fire
    probability for each of the d^2 target sets, and the distribution of
    Bob's outcome in each basis given that she fired.
    """

    def __init__(
        self,
        d: int,
        config: GameConfig | None = None,
        policy: AlicePolicy | None = None,
        states_config: StatesConfig | None = None,
    ) -> None:
        states_config = states_config or StatesConfig()
        self.d = check_dimension(d, states_config.max_d)
        self._config = config or GameConfig()
        self._policy = policy or MaxControlPolicy()
        if not 0.0 <= self._config.bob_aprime_probability <= 1.0:
            raise DomainError("bob_aprime_probability must lie in [0, 1]")

        n_targets = d * d
        state = max_entangled(d)
        self._fire = np.empty(n_targets)
        self._outcome_probs = np.empty((n_targets, 2, d))
        for target in TargetSet.all(d):
            i = target.index(d)
            p_fire, remote = project_alice(state, steering_vector(d, target), d)
            if remote is None:
                raise ValidationError(f"steering for {target} never fires")
            self._fire[i] = p_fire
            for b, basis in enumerate(_BASES):
                amplitudes = bob_basis(d, basis).vectors.conj() @ remote
                self._outcome_probs[i, b] = np.abs(amplitudes) ** 2

        self._cdf = np.cumsum(self._outcome_probs, axis=2)
        self._cdf[:, :, -1] = 1.0

        # Which basis Bob tests, indexed by his choice (0 = A, 1 = A')
        announcements = [self._policy.announce(basis) for basis in _BASES]
        self._announcement = announcements[0][0]
        self._tested_aprime = np.array([tested is BobBasis.A_PRIME for _, tested in announcements])

        logger.debug(f"TargetingGame d={d}: fire probabilities {np.round(self._fire, 6).tolist()}")

    @property
    def policy(self) -> AlicePolicy:
        return self._policy

    def fire_probability(self, target: TargetSet) -> float:
        return float(self._fire[target.validate(self.d).index(self.d)])

    def conditional_pass_probability(self, target: TargetSet, bob_choice: BobBasis) -> float:
        """Exact P(pass | Alice fired) for one target set and Bob's choice."""
        i = target.validate(self.d).index(self.d)
        choice = _BASES.index(bob_choice)
        tested_aprime = bool(self._tested_aprime[choice])
        expected = target.l if tested_aprime else target.k
        return float(self._outcome_probs[i, int(tested_aprime), expected])

    def _resolve(self, draws: npt.NDArray[np.float64]) -> RoundBatch:
        d = self.d
        n_targets = d * d
        target_index = np.minimum((draws[:, 0] * n_targets).astype(np.int64), n_targets - 1)
        fired = draws[:, 1] < self._fire[target_index]
        bob_aprime = draws[:, 2] < self._config.bob_aprime_probability
        tested_aprime = self._tested_aprime[bob_aprime.astype(np.int64)]

        cdf_rows = self._cdf[target_index, tested_aprime.astype(np.int64)]
        outcome = np.minimum((draws[:, 3:4] >= cdf_rows).sum(axis=1), d - 1)
        expected = np.where(tested_aprime, target_index % d, target_index // d)
        outcome = np.where(fired, outcome, -1)
        passed = fired & (outcome == expected)
        return RoundBatch(target_index, fired, bob_aprime, tested_aprime, outcome, passed)

    def sample(self, n_rounds: int, rng: SeededRNG) -> RoundBatch:
        """Play n_rounds rounds, drawing 4 * n_rounds doubles in chunks."""
        if n_rounds < 1:
            raise DomainError(f"n_rounds must be at least 1, got {n_rounds}")
        batches = []
        remaining = n_rounds
        while remaining > 0:
            size = min(remaining, _CHUNK_ROUNDS)
            batches.append(self._resolve(rng.uniform((size, DRAWS_PER_ROUND))))
            remaining -= size
        if len(batches) == 1:
            return batches[0]
        return RoundBatch(
            *(np.concatenate([getattr(b, name) for b in batches]) for name in RoundBatch.__dataclass_fields__)
        )

    def _to_round(self, batch: RoundBatch, i: int) -> GameRound:
        target = TargetSet.from_index(int(batch.target_index[i]), self.d)
        bob_choice = BobBasis.A_PRIME if batch.bob_aprime[i] else BobBasis.A
        if not batch.fired[i]:
            return GameRound(
                target=target,
                bob_choice=bob_choice,
                alice_fired=False,
                announcement=Announcement.DECLINED,
                verdict=Verdict.DECLINED,
            )
        return GameRound(
            target=target,
            bob_choice=bob_choice,
            alice_fired=True,
            announcement=self._announcement,
            verdict=Verdict.PASS if batch.passed[i] else Verdict.FAIL,
            bob_outcome=int(batch.outcome[i]),
            tested_basis=BobBasis.A_PRIME if batch.tested_aprime[i] else BobBasis.A,
        )

    def play_round(self, rng: SeededRNG) -> GameRound:
        """Play a single round."""
        return self._to_round(self._resolve(rng.uniform((1, DRAWS_PER_ROUND))), 0)

    def play_rounds(self, n_rounds: int, rng: SeededRNG) -> list[GameRound]:
        batch = self.sample(n_rounds, rng)
        return [self._to_round(batch, i) for i in range(len(batch))]

    def simulate(self, n_rounds: int, seed: int) -> GameSummary:
        """Aggregate n_rounds rounds played from `seed`.

        Rates conditioned on an announcement are None when Alice never fired.
        """
        seed = check_seed(seed)
        batch = self.sample(n_rounds, SeededRNG(seed))

        announced = int(batch.fired.sum())
        passes = int(batch.passed.sum())
        fire_rate = announced / n_rounds
        if announced:
            pass_rate = passes / announced
            fail_rate = (announced - passes) / announced
            std_err_pass = math.sqrt(pass_rate * (1.0 - pass_rate) / announced)
        else:
            pass_rate = fail_rate = std_err_pass = None

        on_target = self._announcement is Announcement.TARGET_STATE
        pass_label, fail_label = ("A", "B") if on_target else ("C", "D")
        outcome_counts = {label: 0 for label in ("A", "B", "C", "D")}
        outcome_counts[pass_label] = passes
        outcome_counts[fail_label] = announced - passes
        outcome_counts["declined"] = n_rounds - announced

        summary = GameSummary(
            d=self.d,
            rounds=n_rounds,
            announced=announced,
            fire_rate=fire_rate,
            pass_rate_given_announce=pass_rate,
            fail_rate_given_announce=fail_rate,
            std_err_pass=std_err_pass,
            std_err_fire=math.sqrt(fire_rate * (1.0 - fire_rate) / n_rounds),
            seed=seed,
            policy=self._policy.name,
            outcome_counts=outcome_counts,
        )
        logger.info(
            f"Simulated {n_rounds} rounds at d={self.d} (seed={seed}): "
            f"fire={fire_rate:.4f}, pass|announce={pass_rate if pass_rate is not None else 'undefined'}"
        )
        return summary

    def estimate_bell_value(self, n_rounds: int, seed: int) -> BellEstimate:
        """Estimate B_d from round frequencies.

        Each (target set, Bob basis) pair contributes the empirical mean of
        Y = +1 (fired, correlated), -1 (fired, anticorrelated), 0 (declined)
        over the rounds that drew it.
        """
        if not isinstance(self._policy, MaxControlPolicy):
            raise ValidationError("the Bell estimate needs Bob to test the target he chose")
        seed = check_seed(seed)
        batch = self.sample(n_rounds, SeededRNG(seed))
        n_pairs = 2 * self.d * self.d
        pair = 2 * batch.target_index + batch.bob_aprime.astype(np.int64)
        score = np.where(batch.fired, np.where(batch.passed, 1.0, -1.0), 0.0)

        counts = np.bincount(pair, minlength=n_pairs)
        if np.any(counts < 2):
            raise DomainError(f"{n_rounds} rounds leave some setting pair with fewer than 2 samples")
        sums = np.bincount(pair, weights=score, minlength=n_pairs)
        sums_sq = np.bincount(pair, weights=score * score, minlength=n_pairs)
        means = sums / counts
        variances = (sums_sq - counts * means**2) / (counts - 1)

        value = float(means.sum())
        std_err = float(math.sqrt(np.sum(variances / counts)))
        logger.info(f"Monte-Carlo B_{self.d} = {value:.6f} +/- {std_err:.6f} from {n_rounds} rounds")
        return BellEstimate(d=self.d, value=value, std_err=std_err, rounds=n_rounds, seed=seed)


@lru_cache(maxsize=8)
def _default_game(d: int) -> TargetingGame:
    return TargetingGame(d)


def play_round(d: int, rng: SeededRNG) -> GameRound:
    """Play one max-control round at dimension d."""
    return _default_game(d).play_round(rng)


def simulate(d: int, n_rounds: int, seed: int, policy: AlicePolicy | None = None) -> GameSummary:
    """Simulate n_rounds rounds at dimension d from `seed`."""
    game = _default_game(d) if policy is None else TargetingGame(d, policy=policy)
    return game.simulate(n_rounds, seed)


def estimate_bell_value(d: int, n_rounds: int, seed: int) -> BellEstimate:
    """Monte-Carlo estimate of B_d with its standard error."""
    return _default_game(d).estimate_bell_value(n_rounds, seed)

"""Shared data models for qst-bell.

Dataclasses and enums used across the state constructors, the targeting game,
the Bell sum and the local hidden variable scan. Vectors and matrices are
plain numpy arrays; a state vector is a 1-D complex128 array and an operator
a square complex128 array.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np
import numpy.typing as npt
import pandas as pd

from qst_bell.utils.errors import DomainError, ValidationError

StateVector = npt.NDArray[np.complex128]
HermitianOperator = npt.NDArray[np.complex128]


class BasisLabel(str, Enum):
    A = "A"
    A_PRIME = "A_prime"
    OTHER = "other"


class BobBasis(str, Enum):
    """Bob's von Neumann measurement, one per mutually unbiased basis."""

    A = "A"
    A_PRIME = "A_prime"

    @property
    def other(self) -> BobBasis:
        return BobBasis.A_PRIME if self is BobBasis.A else BobBasis.A


class Announcement(str, Enum):
    TARGET_STATE = "target_state"
    NON_TARGET_STATE = "non_target_state"
    DECLINED = "declined"


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    DECLINED = "declined"


class LhvMode(str, Enum):
    EXHAUSTIVE = "exhaustive"
    ANALYTIC = "analytic"
    SAMPLED = "sampled"


@dataclass(frozen=True, order=True)
class TargetSet:
    """Pair of targets |a_k> (computational) and |a'_l> (Fourier)."""

    k: int
    l: int

    def validate(self, d: int) -> TargetSet:
        if not (0 <= self.k < d and 0 <= self.l < d):
            raise DomainError(f"target ({self.k}, {self.l}) out of range for d={d}")
        return self

    def index(self, d: int) -> int:
        """Row-major position k*d + l among the d^2 target sets."""
        return self.k * d + self.l

    @classmethod
    def from_index(cls, index: int, d: int) -> TargetSet:
        return cls(index // d, index % d)

    @classmethod
    def all(cls, d: int) -> list[TargetSet]:
        return [cls(k, l) for k in range(d) for l in range(d)]


@dataclass(frozen=True)
class OrthonormalBasis:
    """d pairwise-orthonormal vectors; vectors[i] is basis state i."""

    dim: int
    vectors: npt.NDArray[np.complex128]  # shape (dim, dim), one vector per row
    label: BasisLabel = BasisLabel.OTHER

    def __getitem__(self, index: int) -> StateVector:
        return self.vectors[index]

    def __len__(self) -> int:
        return self.dim

    def gram(self) -> npt.NDArray[np.complex128]:
        """Matrix of inner products <v_i|v_j>."""
        return self.vectors.conj() @ self.vectors.T


@dataclass(frozen=True)
class IntermediateGrid:
    """All d^2 intermediate states |m_kl> between |a_k> and |a'_l>."""

    dim: int
    states: npt.NDArray[np.complex128]  # shape (dim, dim, dim); states[k, l] = |m_kl>
    normalizer: float  # N = 2(1 + 1/sqrt(d))

    def __getitem__(self, target: TargetSet) -> StateVector:
        return self.states[target.k, target.l]


@dataclass(frozen=True)
class EigenDecomposition:
    """Full spectrum of a Hermitian operator, eigenvalues descending."""

    eigenvalues: npt.NDArray[np.float64]
    eigenvectors: npt.NDArray[np.complex128]  # column i pairs with eigenvalues[i]

    @property
    def top_value(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def top_vector(self) -> StateVector:
        return self.eigenvectors[:, 0]

    def reconstruct(self) -> HermitianOperator:
        """Sum of lambda_i |v_i><v_i|."""
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True)
class GameRound:
    """One round of the targeting game played on a shared entangled pair."""

    target: TargetSet
    bob_choice: BobBasis
    alice_fired: bool
    announcement: Announcement
    verdict: Verdict
    bob_outcome: int | None = None
    tested_basis: BobBasis | None = None  # basis of the state Alice announced

    def __post_init__(self) -> None:
        declined = self.announcement is Announcement.DECLINED
        if declined == self.alice_fired or declined != (self.verdict is Verdict.DECLINED):
            raise ValidationError(f"inconsistent round: fired={self.alice_fired}, {self.announcement}, {self.verdict}")
        if (self.bob_outcome is not None) != self.alice_fired:
            raise ValidationError("bob_outcome must be present exactly when Alice fired")

    @property
    def outcome_label(self) -> str | None:
        """Outcome (A)-(D) of the four-step game, None when Alice declined."""
        if self.verdict is Verdict.DECLINED:
            return None
        on_target = self.announcement is Announcement.TARGET_STATE
        passed = self.verdict is Verdict.PASS
        if on_target:
            return "A" if passed else "B"
        return "C" if passed else "D"


@dataclass(frozen=True)
class GameSummary:
    """Aggregate of many rounds; rates are None when no round was announced."""

    d: int
    rounds: int
    announced: int
    fire_rate: float
    pass_rate_given_announce: float | None
    fail_rate_given_announce: float | None
    std_err_pass: float | None
    std_err_fire: float
    seed: int
    policy: str = "max_control"
    outcome_counts: dict[str, int] = field(default_factory=dict)

    @property
    def rates_defined(self) -> bool:
        return self.announced > 0


@dataclass(frozen=True)
class SettingPair:
    """Alice's binary measurement m_kl together with Bob's basis choice."""

    alice: TargetSet
    bob: BobBasis

    @classmethod
    def all(cls, d: int) -> list[SettingPair]:
        return [cls(target, bob) for target in TargetSet.all(d) for bob in BobBasis]


@dataclass(frozen=True)
class ValueAssignment:
    """Values attached to the states and the grouping of m_kl into M-sets.

    The value of m_kl is its A index k; m_kl belongs to M_i with
    i = (l - k) mod d. For Alice holding M_i and Bob measuring A', Alice's
    value is (d - i) mod d higher than Bob's correlated value.
    """

    d: int

    def m_value(self, k: int, l: int) -> int:
        return k

    def a_value(self, i: int) -> int:
        return i

    def aprime_value(self, j: int) -> int:
        return j

    def mset_of(self, k: int, l: int) -> int:
        return (l - k) % self.d

    def mset_members(self, i: int) -> list[TargetSet]:
        """Members of M_i ordered by value."""
        return [TargetSet(k, (k + i) % self.d) for k in range(self.d)]

    def shift_rule(self, i: int) -> int:
        """Shift s such that M_i correlates with A' when m_value = aprime_value + s (mod d)."""
        return (self.d - i) % self.d


@dataclass(frozen=True)
class JointRow:
    """Joint probabilities p(fire and Bob outcome = x) for one setting pair."""

    pair: SettingPair
    probabilities: tuple[float, ...]
    correlated_index: int

    @property
    def fire_probability(self) -> float:
        return float(sum(self.probabilities))

    @property
    def correlated(self) -> float:
        return self.probabilities[self.correlated_index]

    @property
    def anticorrelated(self) -> float:
        return self.fire_probability - self.correlated

    @property
    def contribution(self) -> float:
        return self.correlated - self.anticorrelated


@dataclass(frozen=True)
class JointTable:
    """All 2 d^2 joint-probability rows of the Bell sum."""

    d: int
    rows: tuple[JointRow, ...]

    def value(self) -> float:
        """Sum of correlated minus anticorrelated joint probabilities."""
        return float(sum(row.contribution for row in self.rows))

    def to_frame(self) -> pd.DataFrame:
        records: list[dict[str, Any]] = []
        for row in self.rows:
            record: dict[str, Any] = {
                "k": row.pair.alice.k,
                "l": row.pair.alice.l,
                "bob": row.pair.bob.value,
                "correlated_index": row.correlated_index,
            }
            for x, p in enumerate(row.probabilities):
                record[f"p{x}"] = p
            record["contribution"] = row.contribution
            records.append(record)
        return pd.DataFrame.from_records(records)


@dataclass(frozen=True)
class BellReport:
    """Quantum value of B_d against the local bound."""

    d: int
    quantum_value: float
    classical_bound: float
    violation_ratio: float
    table: JointTable

    def group_rows(self) -> pd.DataFrame:
        """Correlated and anticorrelated mass per M-set and Bob basis."""
        values = ValueAssignment(self.d)
        frame = self.table.to_frame()
        frame["mset"] = [values.mset_of(k, l) for k, l in zip(frame["k"], frame["l"])]
        frame["correlated"] = [row.correlated for row in self.table.rows]
        frame["anticorrelated"] = [row.anticorrelated for row in self.table.rows]
        grouped = frame.groupby(["mset", "bob"], sort=True)[["correlated", "anticorrelated"]].sum()
        return grouped.reset_index()


@dataclass(frozen=True, order=True)
class LhvStrategy:
    """Deterministic outcomes for every measurement in the Bell sum.

    Bit k*d + l of `fires` is set when measurement m_kl answers "yes".
    """

    a: int
    a_prime: int
    fires: int

    def fired(self, k: int, l: int, d: int) -> bool:
        return bool((self.fires >> (k * d + l)) & 1)

    def fired_targets(self, d: int) -> list[TargetSet]:
        return [t for t in TargetSet.all(d) if self.fired(t.k, t.l, d)]


@dataclass(frozen=True)
class LhvResult:
    """Maximum of the Bell sum over local deterministic strategies."""

    d: int
    max_value: int
    argmax: LhvStrategy
    strategies_scanned: int
    mode: LhvMode


@dataclass(frozen=True)
class SeesawResult:
    """Best Bell value reached by alternating state and effect updates."""

    d: int
    best_value: float
    trial_values: tuple[float, ...]
    iterations: tuple[int, ...]
    converged: bool  # False when any trial hit the iteration cap
    best_state: StateVector | None = None
    best_effects: npt.NDArray[np.complex128] | None = None  # shape (d*d, d)


@dataclass(frozen=True)
class BellEstimate:
    """Monte-Carlo estimate of B_d from tallied game rounds."""

    d: int
    value: float
    std_err: float
    rounds: int
    seed: int


@dataclass(frozen=True)
class SweepRow:
    """Quantum value against the local bound at one dimension."""

    d: int
    quantum: float
    classical: float
    ratio: float


@dataclass(frozen=True)
class PerturbationResult:
    """Top Bell-operator eigenvalue under random kicks of Alice's effects."""

    d: int
    baseline: float
    max_perturbed: float
    samples: int
    scale: float
    ascent_found: bool

"""Seeded, splittable random streams.

Every stream is a numpy Generator driven by the counter-based Philox
bit generator, seeded through a SeedSequence. Child streams are spawned from
the SeedSequence, so a partition of work across threads draws exactly the
same numbers as a serial run.
"""

from __future__ import annotations

import numpy as np
import numpy.typing as npt

from qst_bell.utils.errors import DomainError

MAX_SEED = 2**64 - 1


def check_seed(seed: int) -> int:
    """Validate a 64-bit unsigned seed."""
    if not 0 <= int(seed) <= MAX_SEED:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return int(seed)


class SeededRNG:
    """Philox-backed random stream with an explicit seed.

    `seed` is always the root seed the stream family was created from;
    spawned children share it and differ in `spawn_key`.
    """

    def __init__(self, seed: int | np.random.SeedSequence) -> None:
        if isinstance(seed, np.random.SeedSequence):
            self._seed_seq = seed
            self._seed = int(seed.entropy) if isinstance(seed.entropy, int) else 0
        else:
            self._seed = check_seed(seed)
            self._seed_seq = np.random.SeedSequence(self._seed)
        self._generator = np.random.Generator(np.random.Philox(self._seed_seq))

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def spawn_key(self) -> tuple[int, ...]:
        """Position in the spawn tree; () for a root stream."""
        return tuple(self._seed_seq.spawn_key)

    @property
    def generator(self) -> np.random.Generator:
        return self._generator

    def uniform(self, size: int | tuple[int, ...] | None = None) -> npt.NDArray[np.float64] | float:
        """Uniform doubles in [0, 1); one double per element."""
        return self._generator.random(size)

    def complex_normal(self, size: int) -> npt.NDArray[np.complex128]:
        """Standard complex Gaussian vector (2 * size normal draws)."""
        draws = self._generator.standard_normal((size, 2))
        return draws[:, 0] + 1j * draws[:, 1]

    def integers(self, high: int, size: int | tuple[int, ...]) -> npt.NDArray[np.int64]:
        return self._generator.integers(0, high, size=size)

    def spawn(self, n: int) -> list[SeededRNG]:
        """Independent child streams, deterministic given the parent seed and call order."""
        return [SeededRNG(child) for child in self._seed_seq.spawn(n)]

    def fork(self) -> SeededRNG:
        """Create a single child stream for a sub-task."""
        return self.spawn(1)[0]

"""Tests for the seeded random streams."""

import numpy as np
import pytest

from qst_bell.utils.errors import DomainError
from qst_bell.utils.rng import MAX_SEED, SeededRNG, check_seed


def test_same_seed_same_stream() -> None:
    np.testing.assert_array_equal(SeededRNG(42).uniform(100), SeededRNG(42).uniform(100))
    assert not np.array_equal(SeededRNG(42).uniform(10), SeededRNG(43).uniform(10))


def test_chunked_draws_match_single_draw() -> None:
    whole = SeededRNG(1).uniform((6, 4))
    rng = SeededRNG(1)
    pieces = np.vstack([rng.uniform((2, 4)) for _ in range(3)])
    np.testing.assert_array_equal(whole, pieces)


def test_check_seed_bounds() -> None:
    assert check_seed(0) == 0
    assert check_seed(MAX_SEED) == MAX_SEED
    with pytest.raises(DomainError):
        check_seed(-1)
    with pytest.raises(DomainError):
        check_seed(MAX_SEED + 1)


def test_spawn_is_deterministic_and_independent() -> None:
    first = [child.uniform(5) for child in SeededRNG(7).spawn(3)]
    second = [child.uniform(5) for child in SeededRNG(7).spawn(3)]
    for a, b in zip(first, second):
        np.testing.assert_array_equal(a, b)
    assert not np.array_equal(first[0], first[1])


def test_complex_normal_shape() -> None:
    draws = SeededRNG(3).complex_normal(1000)
    assert draws.shape == (1000,)
    assert draws.dtype == np.complex128
    assert abs(np.mean(np.abs(draws) ** 2) - 2.0) < 0.2


def test_fork_differs_from_parent() -> None:
    parent = SeededRNG(5)
    child = parent.fork()
    assert not np.array_equal(parent.uniform(5), child.uniform(5))


def test_children_keep_root_seed_and_distinct_spawn_keys() -> None:
    parent = SeededRNG(11)
    children = parent.spawn(3)
    assert parent.spawn_key == ()
    assert [child.seed for child in children] == [11, 11, 11]
    assert [child.spawn_key for child in children] == [(0,), (1,), (2,)]
    assert parent.fork().spawn_key == (3,)
    assert children[1].fork().spawn_key == (1, 0)

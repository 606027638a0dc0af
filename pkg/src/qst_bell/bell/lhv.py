"""Local hidden variable bound of the Bell sum.

A deterministic strategy fixes Bob's outcome in A and in A' and decides for
each of Alice's d^2 binary measurements whether it answers "yes". A fired
measurement m_kl scores +1 for each of its indices matching Bob's outcome in
the corresponding basis and -1 otherwise, so every fired term is +2, 0 or -2
and declined measurements score 0.
"""

from __future__ import annotations

from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import numpy.typing as npt

from qst_bell.models import LhvMode, LhvResult, LhvStrategy
from qst_bell.utils.config import LhvConfig
from qst_bell.utils.errors import CapacityError, DomainError
from qst_bell.utils.logging import get_logger
from qst_bell.utils.rng import SeededRNG

logger = get_logger("bell.lhv")

_DEFAULTS = LhvConfig()
_SAMPLE_CHUNK = 100_000


def _check_d(d: int) -> int:
    if d < 2:
        raise DomainError(f"local dimension must be at least 2, got {d}")
    return d


def contribution_vector(a: int, a_prime: int, d: int) -> npt.NDArray[np.int64]:
    """Score of each measurement m_kl if fired, in k*d + l order."""
    if not (0 <= a < d and 0 <= a_prime < d):
        raise DomainError(f"outcomes ({a}, {a_prime}) out of range for d={d}")
    k, l = np.divmod(np.arange(d * d), d)
    return np.where(k == a, 1, -1) + np.where(l == a_prime, 1, -1)


def score_strategy(strategy: LhvStrategy, d: int) -> int:
    """Bell sum of one deterministic strategy."""
    _check_d(d)
    if not 0 <= strategy.fires < (1 << (d * d)):
        raise DomainError(f"fire mask {strategy.fires:#x} wider than {d * d} bits")
    contributions = contribution_vector(strategy.a, strategy.a_prime, d)
    return int(sum(int(contributions[i]) for i in range(d * d) if (strategy.fires >> i) & 1))


def _all_masks(d: int) -> npt.NDArray[np.int8]:
    """Row m holds the d^2 fire bits of mask m."""
    masks = np.arange(1 << (d * d), dtype=np.int64)
    return ((masks[:, None] >> np.arange(d * d)) & 1).astype(np.int8)


def _best_for_outcomes(
    bits: npt.NDArray[np.int8], a: int, a_prime: int, d: int
) -> tuple[int, int, int, int]:
    scores = bits @ contribution_vector(a, a_prime, d).astype(np.int16)
    mask = int(np.argmax(scores))  # first occurrence is the lowest mask
    return int(scores[mask]), a, a_prime, mask


def enumerate_max(d: int, max_d: int = _DEFAULTS.exhaustive_max_d, threads: int = 1) -> LhvResult:
    """Exact maximum over all d^2 * 2^(d^2) deterministic strategies.

    Ties go to the lowest (a, a', mask) in lexicographic order.

    Raises:
        CapacityError: d above max_d; use analytic_max instead.
    """
    _check_d(d)
    if d > max_d:
        raise CapacityError(
            f"exhaustive LHV scan at d={d} needs {d * d} x 2^{d * d} strategies "
            f"(cap d <= {max_d}); use analytic_max"
        )
    bits = _all_masks(d)
    outcomes = [(a, a_prime) for a in range(d) for a_prime in range(d)]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda pair: _best_for_outcomes(bits, pair[0], pair[1], d), outcomes))
    else:
        results = [_best_for_outcomes(bits, a, a_prime, d) for a, a_prime in outcomes]

    best = results[0]
    for result in results[1:]:
        if result[0] > best[0]:
            best = result

    value, a, a_prime, mask = best
    scanned = len(outcomes) * bits.shape[0]
    logger.info(f"LHV enumeration d={d}: max {value} over {scanned} strategies")
    return LhvResult(
        d=d,
        max_value=value,
        argmax=LhvStrategy(a=a, a_prime=a_prime, fires=mask),
        strategies_scanned=scanned,
        mode=LhvMode.EXHAUSTIVE,
    )


def analytic_max(d: int) -> LhvResult:
    """Maximum by the counting argument, valid for any d.

    For fixed (a, a') the best mask fires every measurement with a
    nonnegative contribution. Only m_(a a') scores +2; the rest score 0 or
    -2, so every (a, a') reaches exactly 2.
    """
    _check_d(d)
    best: LhvStrategy | None = None
    best_value = 0
    for a in range(d):
        for a_prime in range(d):
            contributions = contribution_vector(a, a_prime, d)
            mask = sum(1 << i for i in range(d * d) if contributions[i] >= 0)
            value = int(contributions[contributions >= 0].sum())
            if best is None or value > best_value:
                best, best_value = LhvStrategy(a=a, a_prime=a_prime, fires=mask), value
    assert best is not None
    logger.info(f"LHV analytic bound d={d}: {best_value}")
    return LhvResult(d=d, max_value=best_value, argmax=best, strategies_scanned=d * d, mode=LhvMode.ANALYTIC)


def sample_max(d: int, n: int = _DEFAULTS.sample_size, seed: int = 0) -> LhvResult:
    """Best score among n uniformly random deterministic strategies."""
    _check_d(d)
    if n < 1:
        raise DomainError(f"sample size must be at least 1, got {n}")
    rng = SeededRNG(seed)
    width = d * d
    k, l = np.divmod(np.arange(width), d)
    weights = np.left_shift(np.int64(1), np.arange(width, dtype=np.int64))

    best_value: int | None = None
    best: LhvStrategy | None = None
    remaining = n
    while remaining > 0:
        size = min(remaining, _SAMPLE_CHUNK)
        a = rng.integers(d, size)
        a_prime = rng.integers(d, size)
        bits = rng.integers(2, (size, width)).astype(np.int16)
        contributions = np.where(k == a[:, None], 1, -1) + np.where(l == a_prime[:, None], 1, -1)
        scores = (bits * contributions).sum(axis=1)
        i = int(np.argmax(scores))
        if best_value is None or scores[i] > best_value:
            best_value = int(scores[i])
            best = LhvStrategy(a=int(a[i]), a_prime=int(a_prime[i]), fires=int(bits[i].astype(np.int64) @ weights))
        remaining -= size

    assert best is not None and best_value is not None
    logger.info(f"LHV sampling d={d}: max {best_value} over {n} random strategies (seed={seed})")
    return LhvResult(d=d, max_value=best_value, argmax=best, strategies_scanned=n, mode=LhvMode.SAMPLED)


def mixture_value(strategies: Sequence[LhvStrategy], weights: Sequence[float], d: int) -> float:
    """Bell sum of a probabilistic mixture of deterministic strategies."""
    if len(strategies) != len(weights) or not strategies:
        raise DomainError("a mixture needs one weight per strategy and at least one strategy")
    w = np.asarray(weights, dtype=np.float64)
    if np.any(w < 0.0) or abs(float(w.sum()) - 1.0) > 1e-12:
        raise DomainError("mixture weights must be nonnegative and sum to 1")
    scores = np.array([score_strategy(s, d) for s in strategies], dtype=np.float64)
    return float(w @ scores)


def classical_bound(d: int, mode: str = "auto", config: LhvConfig | None = None, threads: int = 1) -> LhvResult:
    """LHV maximum by the requested mode; "auto" enumerates when d is small enough."""
    config = config or _DEFAULTS
    if mode == "auto":
        mode = "enumerate" if d <= config.exhaustive_max_d else "analytic"
    if mode == "enumerate":
        return enumerate_max(d, max_d=config.exhaustive_max_d, threads=threads)
    if mode == "analytic":
        return analytic_max(d)
    if mode == "sample":
        return sample_max(d, n=config.sample_size)
    raise ValueError(f"Unknown LHV mode: {mode}. Supported: auto, enumerate, analytic, sample")

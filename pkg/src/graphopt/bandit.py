"""Fixed-budget best-arm identification by successive rejects.

Arms are indexed 0..K-1. A sampler is any callable
``sampler(arm, count, rng) -> (mean, taken)`` returning the empirical mean
of up to ``count`` pulls and how many were actually taken (fewer once an
underlying budget runs dry; it may raise BudgetExhaustedError when nothing
is left). The algorithm always maximizes; negate rewards to minimize.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .oracle import BudgetExhaustedError, NoisyOracle

Sampler = Callable[[int, int, np.random.Generator], tuple[float, int]]


def log_bar(K: int) -> float:
    """1/2 + sum_{i=2}^{K} 1/i, the normalizer of the phase budgets."""
    if K < 2:
        raise ValueError("need at least two arms")
    return 0.5 + sum(1.0 / i for i in range(2, K + 1))


@dataclass(frozen=True)
class BudgetSchedule:
    """Cumulative per-arm pull counts B_0 <= B_1 <= ... <= B_{K-1}.

    After phase k every surviving arm has been pulled B_k times in total;
    the grand total over all phases never exceeds the budget B.
    """

    K: int
    B: int
    cumulative: tuple[int, ...]

    def phase_pulls(self, k: int) -> int:
        """Fresh pulls per surviving arm in phase k (1-based)."""
        if not 1 <= k <= self.K - 1:
            raise ValueError(f"phase k must be in 1..{self.K - 1}")
        return self.cumulative[k] - self.cumulative[k - 1]

    def total_pulls(self) -> int:
        return sum(self.cumulative[1:]) + self.cumulative[-1]


def budget_schedule(K: int, B: int) -> BudgetSchedule:
    """Phase schedule B_k = ceil((B - K) / (log_bar(K) * (K + 1 - k)))."""
    if K < 2:
        raise ValueError("need at least two arms")
    if B <= K:
        raise ValueError(f"budget {B} must exceed the number of arms {K}")
    lb = log_bar(K)
    cumulative = [0]
    for k in range(1, K):
        cumulative.append(math.ceil((B - K) / (lb * (K + 1 - k))))
    sched = BudgetSchedule(K, B, tuple(cumulative))
    assert sched.total_pulls() <= B, "schedule overran its budget"
    return sched


def successive_reject(
    K: int, sampler: Sampler, B: int, rng: np.random.Generator
) -> int:
    """Best-arm guess after K-1 elimination phases within budget B.

    Each phase tops every surviving arm up to the schedule's cumulative
    pull count, then rejects the arm with the worst empirical mean (ties
    reject the higher index). If the sampler's source dries up mid-run the
    remaining eliminations use the means collected so far.
    """
    sched = budget_schedule(K, B)
    sums = np.zeros(K)
    counts = np.zeros(K, dtype=np.int64)
    remaining = list(range(K))
    exhausted = False
    for k in range(1, K):
        pulls = sched.phase_pulls(k)
        if pulls > 0 and not exhausted:
            for arm in remaining:
                try:
                    mean, taken = sampler(arm, pulls, rng)
                except BudgetExhaustedError:
                    exhausted = True
                    break
                sums[arm] += mean * taken
                counts[arm] += taken
                if taken < pulls:
                    exhausted = True
                    break

        def empirical(arm: int) -> float:
            if counts[arm] == 0:
                return -math.inf
            return sums[arm] / counts[arm]

        worst = min(remaining, key=lambda a: (empirical(a), -a))
        remaining.remove(worst)
    return remaining[0]


def oracle_sampler(
    oracle: NoisyOracle, arms: Sequence[int], sign: float = 1.0
) -> Sampler:
    """Adapt a NoisyOracle to the sampler protocol.

    ``arms[i]`` is the node behind arm i; sign=-1 turns minimization of
    the oracle's values into reward maximization.
    """

    def pull(arm: int, count: int, rng: np.random.Generator) -> tuple[float, int]:
        mean, taken = oracle.sample_mean(arms[arm], count, rng)
        return sign * mean, taken

    return pull


def bernoulli_sampler(means: Sequence[float]) -> Sampler:
    """Unmetered Bernoulli arms with the given success probabilities."""
    p = np.asarray(means, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("bernoulli means must lie in [0, 1]")

    def pull(arm: int, count: int, rng: np.random.Generator) -> tuple[float, int]:
        return float(rng.binomial(count, p[arm])) / count, count

    return pull


def hardness(gaps: Sequence[float]) -> float:
    """Problem hardness H = max_i i * Delta_(i)^(-2).

    ``gaps`` holds the K-1 positive suboptimality gaps of the non-best
    arms. The best arm enters the ranking with a pseudo-gap equal to the
    smallest of these before sorting ascending.
    """
    deltas = [float(d) for d in gaps]
    if not deltas:
        raise ValueError("need at least one suboptimal arm gap")
    if min(deltas) <= 0:
        raise ValueError("gaps must be positive")
    ranked = sorted([min(deltas)] + deltas)
    return max((i + 1) / d**2 for i, d in enumerate(ranked))


def sr_error_bound(K: int, H: float, B: int) -> float:
    """Misidentification bound (K(K-1)/2) exp(-(B-K) / (log_bar(K) H)).

    Clamped to [0, 1]; budgets B <= K give the vacuous bound 1.
    """
    if K < 2:
        raise ValueError("need at least two arms")
    if H <= 0:
        raise ValueError("hardness must be positive")
    if B <= K:
        return 1.0
    raw = (K * (K - 1) / 2.0) * math.exp(-(B - K) / (log_bar(K) * H))
    return min(1.0, raw)


def sr_bound_loose(n: int, delta1: float, B: int) -> float:
    """One-term bound (n(n-1)/2) exp(-(B-n) delta1^2 / (n log_bar(n)))."""
    if n < 2:
        raise ValueError("need at least two arms")
    if delta1 <= 0:
        raise ValueError("smallest gap must be positive")
    if B <= n:
        return 1.0
    raw = (n * (n - 1) / 2.0) * math.exp(-(B - n) * delta1**2 / (n * log_bar(n)))
    return min(1.0, raw)

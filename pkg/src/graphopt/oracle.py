"""Noisy value oracles with a sample meter and optional hard budget."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graphs import Graph, random_walk
from .values import ValueTable


class BudgetExhaustedError(RuntimeError):
    """The oracle's sample budget is spent; no observation was produced."""


@dataclass
class NoisyOracle:
    """Observation source over a value table.

    noise="bernoulli" returns 0/1 draws with success probability f(x)
    (values must then lie in [0, 1]); noise="gaussian" returns
    f(x) + N(0, R^2). Every scalar observation advances ``used`` by one;
    when ``budget`` is set, draws beyond it raise BudgetExhaustedError.
    """

    values: ValueTable
    noise: str = "bernoulli"
    R: float = 0.5
    budget: int | None = None
    used: int = field(default=0, init=False)

    def __post_init__(self):
        if self.noise not in ("bernoulli", "gaussian"):
            raise ValueError(f"unknown noise kind {self.noise!r}")
        if self.noise == "bernoulli":
            lo, hi = self.values.means.min(), self.values.means.max()
            if lo < 0.0 or hi > 1.0:
                raise ValueError("bernoulli noise needs values in [0, 1]")
        if self.noise == "gaussian" and self.R < 0:
            raise ValueError("gaussian noise scale R must be >= 0")
        if self.budget is not None and self.budget < 0:
            raise ValueError("budget must be >= 0 when set")

    @property
    def remaining(self) -> int | None:
        if self.budget is None:
            return None
        return max(0, self.budget - self.used)

    def _take(self, count: int) -> int:
        """Reserve up to ``count`` observations; 0 available raises."""
        if count <= 0:
            raise ValueError("count must be >= 1")
        if self.budget is not None:
            count = min(count, self.budget - self.used)
            if count <= 0:
                raise BudgetExhaustedError(f"budget {self.budget} spent")
        self.used += count
        return count

    def sample(self, x: int, rng: np.random.Generator) -> float:
        """One noisy observation of node x."""
        self._take(1)
        f = self.values.value(x)
        if self.noise == "bernoulli":
            return float(rng.random() < f)
        return f + self.R * float(rng.standard_normal())

    def sample_mean(self, x: int, count: int, rng: np.random.Generator) -> tuple[float, int]:
        """Mean of up to ``count`` observations of x, with the number taken.

        Drawn in one closed-form batch (binomial, or normal with variance
        R^2/k), which matches the distribution of k independent draws. A
        nearly spent budget yields a partial batch; a spent one raises.
        """
        k = self._take(count)
        f = self.values.value(x)
        if self.noise == "bernoulli":
            return float(rng.binomial(k, f)) / k, k
        return f + self.R / np.sqrt(k) * float(rng.standard_normal()), k

    def true_mean(self, x: int) -> float:
        """Noise-free value of x; does not touch the meter."""
        return self.values.value(x)


def smoothed_sample(
    oracle: NoisyOracle, g: Graph, x: int, T: int, rng: np.random.Generator
) -> tuple[float, int]:
    """Observe the endpoint of a T-step random walk from x.

    The walk itself is free; the single endpoint observation is metered.
    Returns (observation, endpoint).
    """
    end = random_walk(g, x, T, rng)
    return oracle.sample(end, rng), end

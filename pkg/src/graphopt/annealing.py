"""Noisy simulated annealing with an exponential-weight acceptance kernel,
its sample-size rule, and the closed-form round/accuracy calculators.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .graphs import Graph
from .oracle import BudgetExhaustedError, NoisyOracle
from .records import TrialRecord


@dataclass(frozen=True)
class SAConfig:
    """Inverse temperature, samples per value estimate, and step count.

    gamma is fixed for the whole run. Each step re-estimates both the
    current node and the proposed neighbor with ``s`` fresh samples, so a
    full run costs 2*s*steps observations.
    """

    gamma: float
    s: int = 1
    steps: int = 0
    minimize: bool = True

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if self.s < 1:
            raise ValueError("samples per estimate must be >= 1")
        if self.steps < 0:
            raise ValueError("steps must be >= 0")


def estimate_value(oracle: NoisyOracle, x: int, s: int, rng: np.random.Generator) -> float:
    """Mean of s fresh metered samples of x.

    Near the budget cap the mean covers only the samples still available;
    with nothing left the oracle's BudgetExhaustedError propagates.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    mean, _ = oracle.sample_mean(x, s, rng)
    return mean


def _min1exp(z: float) -> float:
    """min(1, e^z) without overflowing for large positive z."""
    return 1.0 if z >= 0 else math.exp(z)


def sa_transition_probs(
    g: Graph, estimates, x: int, gamma: float
) -> tuple[list[int], np.ndarray]:
    """One-step kernel at x given per-node value estimates (minimization).

    Each neighbor y gets probability min(1, e^{gamma (est[x] - est[y])})
    divided by deg(x); the leftover mass is the self-loop. Returns the
    target list (neighbors in adjacency order, then x itself) and the
    matching probability vector, which is non-negative and sums to 1.
    """
    nbrs = g.neighbors(x)
    if not nbrs:
        raise ValueError(f"node {x} has no neighbors")
    d = len(nbrs)
    fx = estimates[x]
    probs = np.array([_min1exp(gamma * (fx - estimates[y])) / d for y in nbrs])
    self_loop = max(0.0, 1.0 - float(probs.sum()))
    return list(nbrs) + [x], np.append(probs, self_loop)


def sa_step(g: Graph, oracle: NoisyOracle, x: int, cfg: SAConfig, rng: np.random.Generator) -> int:
    """Propose a uniform neighbor and accept by exponential weight.

    Both endpoints are estimated fresh with cfg.s samples (no caching
    across steps; reusing estimates would correlate acceptance decisions).
    Raises BudgetExhaustedError, leaving the state at x, when the
    estimates cannot be made at all.
    """
    nbrs = g.neighbors(x)
    if not nbrs:
        raise ValueError(f"node {x} has no neighbors")
    y = nbrs[int(rng.integers(len(nbrs)))]
    fx = estimate_value(oracle, x, cfg.s, rng)
    fy = estimate_value(oracle, y, cfg.s, rng)
    diff = fx - fy if cfg.minimize else fy - fx
    if diff >= 0 or rng.random() < math.exp(cfg.gamma * diff):
        return y
    return x


def simulated_annealing(
    g: Graph,
    oracle: NoisyOracle,
    x0: int,
    cfg: SAConfig,
    rng: np.random.Generator,
    record_path: bool = False,
):
    """Run cfg.steps annealing steps from x0.

    Returns a TrialRecord; with record_path=True, a (record, trajectory)
    pair where the trajectory starts at x0 and appends each step's state.
    Budget exhaustion stops the chain where it stands.
    """
    if not 0 <= x0 < g.n:
        raise ValueError(f"start node {x0} out of range")
    t0 = time.perf_counter()
    used0 = oracle.used
    x = x0
    path = [x0]
    for _ in range(cfg.steps):
        try:
            x = sa_step(g, oracle, x, cfg, rng)
        except BudgetExhaustedError:
            break
        if record_path:
            path.append(x)
    record = TrialRecord(
        node=x,
        gap=oracle.values.gap_to_best(x, maximize=not cfg.minimize),
        samples=oracle.used - used0,
        time_ms=(time.perf_counter() - t0) * 1000.0,
    )
    return (record, path) if record_path else record


def theory_sample_size(r: int, gamma: float, R: float) -> int:
    """Samples per estimate suggested by the analysis: ceil(2 r gamma^2 R^2),
    never below one."""
    if r < 0 or gamma < 0 or R < 0:
        raise ValueError("r, gamma, R must be >= 0")
    return max(1, math.ceil(2 * r * gamma * gamma * R * R))


class ConvexRoundBound(NamedTuple):
    gamma: float
    t_min: int


class NearlyConvexRoundBound(NamedTuple):
    gamma: float
    beta: float
    t_min: int
    final_bound: float


def sa_round_bound_convex(alpha: float, d: int, eps: float, initial_gap: float) -> ConvexRoundBound:
    """Temperature and step count reaching accuracy eps on an
    alpha-improving instance of degree d.

    gamma = d / (e * alpha * eps); t_min is the smallest t with
    (1 - alpha/d)^t * initial_gap below eps*d/alpha, clamped at 0.
    ``initial_gap`` is the non-negative optimality gap of the start node
    (the source analysis writes the difference with the opposite sign).
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must be in (0, 1)")
    if d < 1:
        raise ValueError("degree d must be >= 1")
    if eps <= 0:
        raise ValueError("eps must be > 0")
    if initial_gap < 0:
        raise ValueError("initial_gap must be >= 0")
    gamma = d / (math.e * alpha * eps)
    arg = alpha * initial_gap / (eps * d)
    if arg <= 1.0:
        t_min = 0
    else:
        t_min = max(0, math.ceil(math.log(arg) / math.log(d / (d - alpha))))
    return ConvexRoundBound(gamma, t_min)


def sa_round_bound_nearly(
    alpha: float, c: float, r: int, d: int, F: float
) -> NearlyConvexRoundBound:
    """Temperature, contraction rate, step count, and the reachable
    accuracy for a (alpha, c, r)-nearly convex instance of degree d.

    gamma = 1/c; beta = 1 - alpha e^{-c r gamma} / d^{r+1}; t_min =
    ceil((r / log(1/beta)) * log(F * alpha * gamma)) clamped at 0, where
    F is the value range. The final accuracy (3/(alpha gamma)) d^{r+1}
    e^r is reported unclamped (it is comparative and can exceed the
    range; a warning is emitted when it does exceed F).
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must be in (0, 1)")
    if c <= 0:
        raise ValueError("c must be > 0")
    if r < 1:
        raise ValueError("r must be >= 1")
    if d < 1:
        raise ValueError("degree d must be >= 1")
    if F <= 0:
        raise ValueError("value range F must be > 0")
    gamma = 1.0 / c
    beta = 1.0 - alpha * math.exp(-c * r * gamma) / d ** (r + 1)
    arg = F * alpha * gamma
    if arg <= 1.0:
        t_min = 0
    else:
        t_min = max(0, math.ceil(r / math.log(1.0 / beta) * math.log(arg)))
    final_bound = 3.0 / (alpha * gamma) * d ** (r + 1) * math.exp(r)
    if final_bound > F:
        warnings.warn(
            f"accuracy bound {final_bound:.3g} exceeds the value range {F:.3g}; "
            "treat it as comparative only",
            stacklevel=2,
        )
    return NearlyConvexRoundBound(gamma, beta, t_min, final_bound)

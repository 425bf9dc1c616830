"""Budgeted local descent: hill-climbing whose one-step move is a best-arm
identification over the closed neighborhood, plus a restart wrapper and the
closed-form error bound for the descent path.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .bandit import log_bar, oracle_sampler, successive_reject
from .graphs import Graph
from .oracle import BudgetExhaustedError, NoisyOracle
from .records import TrialRecord


@dataclass(frozen=True)
class DescendConfig:
    """Round budgets and sense for one descent run.

    ``schedule`` holds the per-round sample budgets T_1..T_S. A round at
    node x needs at least deg(x)+2 samples to be meaningful; the runner
    merges rounds from the tail of the schedule when one falls short.
    """

    schedule: tuple[int, ...]
    restarts: int = 1
    minimize: bool = True

    def __post_init__(self):
        object.__setattr__(self, "schedule", tuple(int(t) for t in self.schedule))
        if any(t <= 0 for t in self.schedule):
            raise ValueError("round budgets must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")

    @property
    def max_path_length(self) -> int:
        return len(self.schedule)

    @staticmethod
    def equal_split(budget: int, rounds: int, restarts: int = 1, minimize: bool = True) -> "DescendConfig":
        """Schedule of ``rounds`` equal budgets floor(budget/rounds)."""
        if rounds < 1:
            raise ValueError("rounds must be >= 1")
        per = budget // rounds
        if per < 1:
            raise ValueError(f"budget {budget} too small for {rounds} rounds")
        return DescendConfig((per,) * rounds, restarts=restarts, minimize=minimize)


def descent_oracle(
    g: Graph,
    oracle: NoisyOracle,
    x: int,
    round_budget: int,
    rng: np.random.Generator,
    minimize: bool = True,
) -> int:
    """One descent move: best arm among {x} and its neighbors.

    Arm 0 is x itself (so ties favor staying put), arms 1.. are the
    neighbors in ascending id order. Pulling an arm draws one noisy
    sample of that node; for minimization the maximized reward is the
    negated sample. Returns the winning node. If the oracle runs dry
    mid-round the current empirical winner is returned.
    """
    arms = (x,) + g.neighbors(x)
    K = len(arms)
    if round_budget <= K:
        raise ValueError(f"round budget {round_budget} must exceed deg(x)+1 = {K}")
    sampler = oracle_sampler(oracle, arms, sign=-1.0 if minimize else 1.0)
    return arms[successive_reject(K, sampler, round_budget, rng)]


def explore_descend(
    g: Graph,
    oracle: NoisyOracle,
    x0: int,
    cfg: DescendConfig,
    rng: np.random.Generator,
) -> TrialRecord:
    """Follow descent_oracle moves through the round schedule.

    Rounds too small for the current node's neighborhood absorb budgets
    from the tail of the schedule; if even the merged remainder is too
    small, or the oracle is exhausted, the walk stops where it stands.
    """
    if not 0 <= x0 < g.n:
        raise ValueError(f"start node {x0} out of range")
    t0 = time.perf_counter()
    used0 = oracle.used
    x = x0
    pending = list(cfg.schedule)
    while pending:
        t = pending.pop(0)
        needed = g.degree(x) + 2
        while t < needed and pending:
            t += pending.pop()
        if t < needed:
            break
        if oracle.remaining == 0:
            break
        x = descent_oracle(g, oracle, x, t, rng, minimize=cfg.minimize)
    return TrialRecord(
        node=x,
        gap=oracle.values.gap_to_best(x, maximize=not cfg.minimize),
        samples=oracle.used - used0,
        time_ms=(time.perf_counter() - t0) * 1000.0,
    )


def default_restarts(budget: int) -> int:
    """Restart count rule 1 + budget/1000 (integer division)."""
    if budget < 0:
        raise ValueError("budget must be >= 0")
    return 1 + budget // 1000


def restart_allocation(budget: int, restarts: int | None = None) -> tuple[int, int]:
    """(restart count, per-restart budget) under the equal-split rule."""
    r = default_restarts(budget) if restarts is None else restarts
    if r < 1:
        raise ValueError("restarts must be >= 1")
    if budget < r:
        raise ValueError(f"budget {budget} cannot cover {r} restarts")
    return r, budget // r


def explore_descend_restarts(
    g: Graph,
    oracle: NoisyOracle,
    budget: int,
    rng: np.random.Generator,
    path_len: int = 4,
    restarts: int | None = None,
    minimize: bool = True,
) -> TrialRecord:
    """Independent uniform-start descents sharing the budget equally.

    With one restart this is exactly explore_descend on a uniform start.
    With several, each restart's share reserves its slice of 5% of the
    total budget; after all descents finish, every terminal node is
    re-estimated with that reserve and the best estimate wins (ties to
    the lowest node id).
    """
    t0 = time.perf_counter()
    used0 = oracle.used
    r, per_restart = restart_allocation(budget, restarts)
    if path_len < 1:
        raise ValueError("path_len must be >= 1")

    def start() -> int:
        return int(rng.integers(g.n))

    if r == 1:
        cfg = DescendConfig.equal_split(budget, path_len, minimize=minimize)
        return explore_descend(g, oracle, start(), cfg, rng)

    eval_per = max(1, (budget // 20) // r)
    descend_per = per_restart - eval_per
    if descend_per < path_len:
        raise ValueError(f"budget {budget} too small for {r} restarts of {path_len} rounds")
    cfg = DescendConfig.equal_split(descend_per, path_len, minimize=minimize)

    finals: list[int] = []
    for _ in range(r):
        finals.append(explore_descend(g, oracle, start(), cfg, rng).node)

    best_node = finals[0]
    best_est = None
    for node in finals:
        try:
            est, _ = oracle.sample_mean(node, eval_per, rng)
        except BudgetExhaustedError:
            break
        if not minimize:
            est = -est
        if best_est is None or est < best_est or (est == best_est and node < best_node):
            best_est = est
            best_node = node
    return TrialRecord(
        node=best_node,
        gap=oracle.values.gap_to_best(best_node, maximize=not minimize),
        samples=oracle.used - used0,
        time_ms=(time.perf_counter() - t0) * 1000.0,
    )


def ed_error_bound(d: int, schedule, per_round_smallest_gaps) -> float:
    """Misidentification bound for a descent path on a d-regular graph.

    (d(d-1)/2) * sum_s exp(-(T_s - d) * gap_s^2 / (d * log_bar(d))),
    clamped to [0, 1]. ``per_round_smallest_gaps`` supplies the smallest
    arm gap at each visited node, one per round of the schedule (under
    noise the realized path is random, so the caller chooses the gaps).
    """
    if d < 2:
        raise ValueError("degree d must be >= 2")
    schedule = [int(t) for t in schedule]
    gaps = [float(x) for x in per_round_smallest_gaps]
    if len(schedule) != len(gaps):
        raise ValueError("schedule and gap lists must have equal length")
    if any(gap <= 0 for gap in gaps):
        raise ValueError("gaps must be positive")
    lb = log_bar(d)
    total = sum(
        math.exp(-(t - d) * gap * gap / (d * lb)) for t, gap in zip(schedule, gaps)
    )
    return min(1.0, (d * (d - 1) / 2.0) * total)

"""Per-run result record shared by the optimizers and the trial harness."""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one optimization run.

    ``node`` is the returned candidate (-1 when the run failed), ``gap``
    its true suboptimality (NaN when unknown), ``samples`` the oracle
    observations consumed, ``time_ms`` wall time. The harness fills in
    trial/algo/budget; standalone runs leave the defaults.
    """

    node: int
    gap: float
    samples: int
    time_ms: float
    trial: int = 0
    algo: str = ""
    budget: int = 0

    def tagged(self, trial: int, algo: str, budget: int) -> "TrialRecord":
        return replace(self, trial=trial, algo=algo, budget=budget)

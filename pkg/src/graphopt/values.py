"""Node value tables: the ground-truth means that noisy oracles observe."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class ValueFormatError(ValueError):
    """A node-value file failed to parse or validate."""


@dataclass(frozen=True)
class ValueTable:
    """True mean value per node, indexed by node id.

    Wraps a read-only float array of length n. ``argmin``/``argmax`` break
    ties toward the lowest node id.
    """

    means: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.means, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("value table must be a non-empty 1-d array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("value table entries must be finite")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "means", arr)

    @property
    def n(self) -> int:
        return int(self.means.shape[0])

    def value(self, x: int) -> float:
        return float(self.means[x])

    def argmin(self) -> int:
        return int(np.argmin(self.means))

    def argmax(self) -> int:
        return int(np.argmax(self.means))

    def best(self, maximize: bool = False) -> int:
        return self.argmax() if maximize else self.argmin()

    def gap_to_best(self, x: int, maximize: bool = False) -> float:
        """Suboptimality of node x: always >= 0 regardless of sense."""
        best = self.value(self.best(maximize))
        return best - self.value(x) if maximize else self.value(x) - best


def save_values(table: ValueTable | Sequence[float], path) -> None:
    """Write one ``node,value`` line per node, ids ascending from 0."""
    means = table.means if isinstance(table, ValueTable) else table
    with open(path, "w", encoding="utf-8") as fh:
        for i, v in enumerate(means):
            fh.write(f"{i},{float(v):.17g}\n")


def load_values(path, n: int | None = None) -> ValueTable:
    """Parse a ``node,value`` file; ids must be 0..n-1 ascending, no gaps.

    Raises ValueFormatError with the offending line number on any defect.
    """
    means: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueFormatError(f"{path}:{lineno}: expected 'node,value', got {line!r}")
            try:
                node = int(parts[0])
                val = float(parts[1])
            except ValueError as exc:
                raise ValueFormatError(f"{path}:{lineno}: {exc}") from exc
            if node != len(means):
                raise ValueFormatError(
                    f"{path}:{lineno}: node ids must ascend without gaps "
                    f"(expected {len(means)}, got {node})"
                )
            if not np.isfinite(val):
                raise ValueFormatError(f"{path}:{lineno}: non-finite value")
            means.append(val)
    if not means:
        raise ValueFormatError(f"{path}: empty value file")
    if n is not None and len(means) != n:
        raise ValueFormatError(f"{path}: expected {n} values, found {len(means)}")
    return ValueTable(np.array(means))

"""Smoothed annealing search for nearest neighbors on a proximity graph,
with the exact brute-force baseline and majority-vote classification.

Distances to the query are exact and noiseless; the stochasticity that
drives exploration comes from random-walk smoothing of the evaluation
point and from the temperature schedule.
"""

from __future__ import annotations

import csv
import math
import os
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .graphs import Graph, random_walk

TAU_FLOOR = 1e-9


@dataclass(frozen=True)
class PointSet:
    """Points in R^dim with optional per-point class labels."""

    coords: np.ndarray = field(repr=False)
    labels: tuple | None = None

    def __post_init__(self):
        arr = np.asarray(self.coords, dtype=float)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("coords must be a non-empty (n, dim) array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coordinates must be finite")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "coords", arr)
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != arr.shape[0]:
                raise ValueError("labels must cover all points")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return int(self.coords.shape[0])

    @property
    def dim(self) -> int:
        return int(self.coords.shape[1])


@dataclass(frozen=True)
class QueryResult:
    """Candidates sorted by true distance to the query, nearest first.

    ``distance_evals`` counts unique points whose exact distance was
    computed; ``short`` marks a pool smaller than the K requested.
    """

    candidates: tuple[int, ...]
    distances: tuple[float, ...]
    distance_evals: int
    short: bool = False


class DistanceCache:
    """Per-query memo of exact distances; revisits are free."""

    def __init__(self, points: PointSet, query):
        self.coords = points.coords
        self.query = np.asarray(query, dtype=float)
        if self.query.shape != (points.dim,):
            raise ValueError(f"query must have dimension {points.dim}")
        self._d2: dict[int, float] = {}

    def evaluate(self, node: int) -> float:
        d2 = self.squared(node)
        return math.sqrt(d2)

    def squared(self, node: int) -> float:
        d2 = self._d2.get(node)
        if d2 is None:
            diff = self.coords[node] - self.query
            d2 = float(diff @ diff)
            self._d2[node] = d2
        return d2

    @property
    def evals(self) -> int:
        return len(self._d2)

    def ranked(self) -> list[tuple[int, float]]:
        """Evaluated nodes as (node, squared distance), nearest first."""
        return sorted(self._d2.items(), key=lambda kv: (kv[1], kv[0]))


def smoothed_sa_search(
    g: Graph,
    points: PointSet,
    query,
    start: int,
    J: int,
    T: int,
    rng: np.random.Generator,
    cache: DistanceCache | None = None,
) -> int:
    """Annealed walk toward the query; returns the final node.

    Each of the J iterations compares the current node against a uniform
    random neighbor, both scored by the exact distance of a T-step
    random-walk endpoint. Better candidates always win; worse ones are
    accepted with probability e^{(f(y)-f(v))/tau} at temperature
    tau = 1 - j/J (floored just above zero, so the last iteration is
    effectively greedy). J=0 returns the start unevaluated.
    """
    if J < 0:
        raise ValueError("J must be >= 0")
    if not 0 <= start < g.n:
        raise ValueError(f"start node {start} out of range")
    if cache is None:
        cache = DistanceCache(points, query)
    x = start
    for j in range(1, J + 1):
        tau = max(1.0 - j / J, TAU_FLOOR)
        fy = cache.evaluate(random_walk(g, x, T, rng))
        nbrs = g.neighbors(x)
        if not nbrs:
            break
        u = nbrs[int(rng.integers(len(nbrs)))]
        fv = cache.evaluate(random_walk(g, u, T, rng))
        if fv <= fy or rng.random() < math.exp((fy - fv) / tau):
            x = u
    return x


def default_rounds(n: int) -> int:
    """ceil(log2 n), the restart/iteration count used when none is given."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return max(1, math.ceil(math.log2(n)))


def sgnn_query(
    g: Graph,
    points: PointSet,
    query,
    I: int,
    J: int,
    T: int,
    K: int,
    rng: np.random.Generator,
) -> QueryResult:
    """K nearest candidates from I independent smoothed searches.

    The candidate pool is every node whose exact distance was computed
    during any restart; terminals are evaluated into the pool, which
    therefore contains them all. A pool smaller than K is returned whole
    and flagged short.
    """
    if I < 1:
        raise ValueError("I must be >= 1")
    if K < 1:
        raise ValueError("K must be >= 1")
    cache = DistanceCache(points, query)
    for _ in range(I):
        start = int(rng.integers(g.n))
        x = smoothed_sa_search(g, points, query, start, J, T, rng, cache=cache)
        cache.evaluate(x)
    ranked = cache.ranked()[:K]
    return QueryResult(
        candidates=tuple(node for node, _ in ranked),
        distances=tuple(math.sqrt(d2) for _, d2 in ranked),
        distance_evals=cache.evals,
        short=cache.evals < K,
    )


def exact_nn(points: PointSet, query, K: int) -> QueryResult:
    """Exhaustive scan baseline; always evaluates all n points."""
    if not 1 <= K <= points.n:
        raise ValueError(f"K must be in 1..{points.n}")
    q = np.asarray(query, dtype=float)
    if q.shape != (points.dim,):
        raise ValueError(f"query must have dimension {points.dim}")
    diff = points.coords - q
    d2 = np.einsum("ij,ij->i", diff, diff)
    order = np.argsort(d2, kind="stable")[:K]
    return QueryResult(
        candidates=tuple(int(i) for i in order),
        distances=tuple(float(math.sqrt(d2[i])) for i in order),
        distance_evals=points.n,
        short=False,
    )


def recall_at_k(result: QueryResult, exact: QueryResult, K: int) -> float:
    """Fraction of the exact top-K retrieved among the result's top-K."""
    if K < 1:
        raise ValueError("K must be >= 1")
    truth = set(exact.candidates[:K])
    got = set(result.candidates[:K])
    return len(truth & got) / min(K, len(truth))


def classify_majority(candidates, labels):
    """Modal label among the candidates (assumed sorted nearest first);
    label ties go to the label of the nearest tied candidate."""
    candidates = list(candidates)
    if not candidates:
        raise ValueError("need at least one candidate")
    if labels is None:
        raise ValueError("labels are required for classification")
    try:
        cand_labels = [labels[c] for c in candidates]
    except (IndexError, KeyError) as exc:
        raise ValueError(f"label missing for candidate: {exc}") from exc
    counts = Counter(cand_labels)
    top = max(counts.values())
    tied = {lab for lab, cnt in counts.items() if cnt == top}
    for lab in cand_labels:
        if lab in tied:
            return lab
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# Point-set files: CSV with one point per row; labels in a separate file,
# one label per line. Like graph value files, labels default to a sibling
# ``<path>.labels`` on save and are picked up from there on load.


def save_points(ps: PointSet, path, labels_path=None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        for row in ps.coords:
            writer.writerow([f"{v:.17g}" for v in row])
    if labels_path is None and ps.labels is not None:
        labels_path = f"{path}.labels"
    if labels_path is not None:
        if ps.labels is None:
            raise ValueError("point set has no labels to save")
        with open(labels_path, "w", encoding="utf-8") as fh:
            for lab in ps.labels:
                fh.write(f"{lab}\n")


def load_points(path, labels_path=None) -> PointSet:
    rows: list[list[float]] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
            if len(rows[-1]) != len(rows[0]):
                raise ValueError(f"{path}:{lineno}: inconsistent dimension")
    if not rows:
        raise ValueError(f"{path}: empty point file")
    if labels_path is None and os.path.exists(f"{path}.labels"):
        labels_path = f"{path}.labels"
    labels = None
    if labels_path is not None:
        with open(labels_path, "r", encoding="utf-8") as fh:
            labels = tuple(line.strip() for line in fh if line.strip())
        if len(labels) != len(rows):
            raise ValueError(f"{labels_path}: expected {len(rows)} labels, got {len(labels)}")
    return PointSet(np.array(rows), labels)

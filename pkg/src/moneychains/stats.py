"""Histograms, empirical estimators, and fit metrics.

The estimators mirror the two ways the chains are observed: widely spaced
snapshots of per-vertex dollar counts (valid when the chain is aperiodic,
pooled across vertices only when they are exchangeable) and exact
occupation times (valid for any irreducible chain, periodic or not).
Distances against closed-form laws use total variation; goodness of fit
uses a Pearson statistic over a deterministic bucket plan.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

# graph families whose vertices are exchangeable, so per-vertex dollar-count
# histograms may be pooled into one sample
POOLABLE_FAMILIES = frozenset({"complete", "cycle"})

NORMALIZATION_TOL = 1e-9


class NotNormalizedError(ValueError):
    """Input vector does not sum to 1 within tolerance."""


class InsufficientSamplesError(ValueError):
    """Too little data for the requested statistic."""


@dataclass
class Histogram:
    """Counted observations of a non-negative integer variable."""

    counts: dict[int, int] = field(default_factory=dict)

    @property
    def total_samples(self) -> int:
        return sum(self.counts.values())

    def add(self, d: int, count: int = 1) -> None:
        if count < 0:
            raise ValueError(f"negative count {count}")
        if count:
            self.counts[int(d)] = self.counts.get(int(d), 0) + count

    def add_array(self, values: np.ndarray) -> None:
        binned = np.bincount(np.asarray(values, dtype=np.int64))
        for d in np.flatnonzero(binned):
            self.add(int(d), int(binned[d]))

    @classmethod
    def from_counts(cls, counts: Sequence[int] | Mapping[int, int]) -> "Histogram":
        h = cls()
        items = (counts.items() if isinstance(counts, Mapping)
                 else enumerate(counts))
        for d, c in items:
            h.add(int(d), int(c))
        return h

    def merge(self, other: "Histogram") -> "Histogram":
        out = Histogram(dict(self.counts))
        for d, c in other.counts.items():
            out.add(d, c)
        return out

    def to_array(self, dmax: int | None = None) -> np.ndarray:
        top = max(self.counts) if self.counts else 0
        if dmax is None:
            dmax = top
        out = np.zeros(dmax + 1, dtype=np.int64)
        for d, c in self.counts.items():
            if d <= dmax:
                out[d] = c
        return out

    def to_probs(self, dmax: int | None = None) -> np.ndarray:
        n = self.total_samples
        if n == 0:
            raise InsufficientSamplesError("empty histogram")
        return self.to_array(dmax) / n


def merge_all(histograms: Iterable[Histogram]) -> Histogram:
    out = Histogram()
    for h in histograms:
        out = out.merge(h)
    return out


class SnapshotMarginal:
    """Observer for ``dynamics.run``: histogram of dollar counts at firings.

    With ``vertices=None`` every vertex contributes one sample per firing
    (pooling; only meaningful when vertices are exchangeable), otherwise
    only the listed vertices do.
    """

    def __init__(self, vertices: Sequence[int] | None = None):
        self.vertices = None if vertices is None else list(vertices)
        self.histogram = Histogram()
        self.snapshots = 0

    def __call__(self, state) -> None:
        config = state.config
        if self.vertices is not None:
            config = config[self.vertices]
        self.histogram.add_array(config)
        self.snapshots += 1


def occupation_time(counts: Sequence[int], weight: int,
                    d: int | None = None):
    """Time-average dollar-count law from ``dynamics.run_occupation``.

    Returns the full probability vector, or the fraction at one ``d``.
    """
    if weight < 1:
        raise InsufficientSamplesError(f"weight {weight} < 1")
    arr = np.asarray(counts, dtype=np.int64)
    if d is None:
        return arr / weight
    if 0 <= d < len(arr):
        return float(arr[d]) / weight
    return 0.0


def tv_distance(p: Sequence[float], q: Sequence[float]) -> float:
    """Total variation distance, half the L1 gap, for aligned vectors.

    Both arguments must cover the same support range; pad the shorter one
    with zeros before calling if supports differ.
    """
    pa = np.asarray(p, dtype=float)
    qa = np.asarray(q, dtype=float)
    if pa.shape != qa.shape:
        raise ValueError(f"support mismatch: {pa.shape} vs {qa.shape}")
    for name, vec in (("first", pa), ("second", qa)):
        if abs(vec.sum() - 1.0) > NORMALIZATION_TOL:
            raise NotNormalizedError(
                f"{name} vector sums to {vec.sum():.12g}, not 1")
    return 0.5 * float(np.abs(pa - qa).sum())


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    dof: int
    buckets: tuple[tuple[int, int | None], ...]


def chi_square(h: Histogram, expected: Sequence[float],
               min_expected: float = 5.0) -> ChiSquareResult:
    """Pearson fit statistic of a histogram against a discrete law.

    Bucket plan: walk d upward, closing a bucket as soon as its expected
    count reaches ``min_expected``; the final bucket is open-ended and
    absorbs all remaining mass (including everything beyond the vector),
    merging backward if its own expected count is short.  The plan depends
    only on ``expected`` and the sample size, never on the observations.

    ``expected`` may be a truncated prefix of the law; the missing tail
    mass is charged to the open-ended bucket.
    """
    q = np.asarray(expected, dtype=float)
    if len(q) == 0 or q.min() < 0 or q.sum() > 1.0 + NORMALIZATION_TOL:
        raise NotNormalizedError(
            f"expected law invalid: length {len(q)}, sum {q.sum():.12g}")
    n = h.total_samples
    if n == 0:
        raise InsufficientSamplesError("empty histogram")

    edges = []  # bucket start positions
    start = 0
    acc = 0.0
    for d in range(len(q)):
        acc += n * q[d]
        if acc >= min_expected:
            edges.append(start)
            start = d + 1
            acc = 0.0
    edges.append(start)  # open-ended tail bucket
    tail_expected = n * (1.0 - q[:start].sum())
    if tail_expected < min_expected and len(edges) >= 2:
        edges.pop()  # fold the short tail into the previous bucket
    if len(edges) < 2:
        raise InsufficientSamplesError(
            f"bucket plan degenerate: {len(edges)} bucket(s) from {n} samples")

    buckets: list[tuple[int, int | None]] = []
    stat = 0.0
    obs_total = 0
    for i, s in enumerate(edges):
        e = edges[i + 1] if i + 1 < len(edges) else None
        if e is None:
            exp_count = n * (1.0 - q[:s].sum())
            obs = n - obs_total
        else:
            exp_count = n * q[s:e].sum()
            obs = sum(c for d, c in h.counts.items() if s <= d < e)
            obs_total += obs
        stat += (obs - exp_count) ** 2 / exp_count
        buckets.append((s, e))
    return ChiSquareResult(statistic=stat, dof=len(buckets) - 1,
                           buckets=tuple(buckets))

"""Euclidean k-nearest-neighbour identification with distance-threshold rejection.

Tie rules, fixed so results are reproducible:

* neighbours equidistant at the k-th place: the lower exemplar index wins;
* vote ties: the tied class owning the nearest neighbour wins, and if
  those nearest distances are equal too, the class name sorting first.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from fisherknn.errors import DimensionError
from fisherknn.linalg import as_matrix

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DistanceReport:
    distances: np.ndarray
    column_sum: float
    sqrt_sum: float
    mean: float
    min: float
    min_index: int


@dataclass(frozen=True)
class Verdict:
    label: str | None  # None when rejected
    candidate: str  # vote winner, reported even when the probe is rejected
    votes: dict[str, int]
    min_distance: float
    threshold_used: float | None = None
    neighbors: tuple[int, ...] = field(default=())
    vote_tie: bool = False
    boundary_tie: bool = False

    @property
    def rejected(self) -> bool:
        return self.label is None


def euclidean_distance(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise DimensionError(f"cannot compare vectors of shapes {x.shape} and {y.shape}")
    diff = x - y
    return math.sqrt(float(diff @ diff))


def _distances(probe, exemplars) -> np.ndarray:
    exemplars = as_matrix(exemplars, "exemplars")
    probe = np.asarray(probe, dtype=np.float64)
    if probe.shape != (exemplars.shape[0],):
        raise DimensionError(f"probe has {probe.size} values, exemplars have {exemplars.shape[0]} rows")
    diff = exemplars - probe[:, None]
    return np.sqrt(np.sum(diff * diff, axis=0))


def distance_report(probe, exemplars) -> DistanceReport:
    """Distances from one probe to every exemplar column, with summary statistics."""
    dist = _distances(probe, exemplars)
    min_index = int(np.argmin(dist))
    return DistanceReport(
        distances=dist,
        column_sum=float(np.sum(dist)),
        sqrt_sum=float(np.sum(np.sqrt(dist))),
        mean=float(np.mean(dist)),
        min=float(dist[min_index]),
        min_index=min_index,
    )


def classify(
    probe,
    exemplars,
    labels: Sequence[str],
    k: int,
    threshold: float | None = None,
    *,
    report: DistanceReport | None = None,
) -> Verdict:
    """Majority vote of the k nearest exemplars; reject if the nearest is beyond ``threshold``."""
    labels = list(labels)
    if report is None:
        report = distance_report(probe, exemplars)
    dist = report.distances
    p = dist.shape[0]
    if len(labels) != p:
        raise DimensionError(f"{len(labels)} labels for {p} exemplars")
    if not 1 <= k <= p:
        raise DimensionError(f"k = {k} out of range 1..{p}")

    order = np.argsort(dist, kind="stable")
    nearest = order[:k]
    boundary_tie = k < p and dist[order[k - 1]] == dist[order[k]]
    if boundary_tie:
        log.info("k-th neighbour tie at distance %.6g resolved by lowest index", dist[order[k - 1]])

    votes: dict[str, int] = {}
    closest: dict[str, float] = {}
    for idx in nearest:
        name = labels[idx]
        votes[name] = votes.get(name, 0) + 1
        closest.setdefault(name, float(dist[idx]))
    top = max(votes.values())
    tied = sorted(name for name, n in votes.items() if n == top)
    winner = min(tied, key=lambda name: (closest[name], name))
    vote_tie = len(tied) > 1
    if vote_tie:
        log.info("vote tie between %s resolved in favour of %s", ",".join(tied), winner)

    rejected = threshold is not None and report.min > threshold
    return Verdict(
        label=None if rejected else winner,
        candidate=winner,
        votes=dict(sorted(votes.items())),
        min_distance=report.min,
        threshold_used=threshold,
        neighbors=tuple(int(i) for i in nearest),
        vote_tie=vote_tie,
        boundary_tie=bool(boundary_tie),
    )


def leave_one_out_min_distances(exemplars) -> np.ndarray:
    """For each exemplar column, its distance to the nearest other column."""
    exemplars = as_matrix(exemplars, "exemplars")
    p = exemplars.shape[1]
    if p < 2:
        raise DimensionError("leave-one-out needs at least 2 exemplars")
    out = np.empty(p)
    for i in range(p):
        dist = _distances(exemplars[:, i], exemplars)
        dist[i] = np.inf
        out[i] = dist.min()
    return out


def suggest_threshold(genuine_min_distances, margin_factor: float = 1.5) -> float:
    values = np.asarray(genuine_min_distances, dtype=np.float64).ravel()
    if values.size == 0:
        raise ValueError("need at least one genuine distance to suggest a threshold")
    if not margin_factor > 0:
        raise ValueError(f"margin factor must be positive, got {margin_factor}")
    return float(margin_factor * values.max())

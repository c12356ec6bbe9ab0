"""Angular-error evaluation: summary statistics, set-to-set assignment
error, and nearest-angle histogram diagnostics."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import pairwise_angles
from .errors import (
    EmptyInputError,
    InvalidConfigError,
    LengthMismatchError,
    NegativeValueError,
)


@dataclass(frozen=True)
class ErrorSummary:
    """The five standard statistics over angular errors plus their
    geometric mean, all in degrees."""

    mean: float
    median: float
    trimean: float
    best25: float
    worst25: float
    avg: float
    count: int

    def as_row(self) -> tuple:
        return (self.mean, self.median, self.trimean, self.best25,
                self.worst25, self.avg)


def geometric_mean(values) -> float:
    a = np.asarray(values, dtype=np.float64)
    if (a == 0).any():
        return 0.0
    return float(np.exp(np.log(a).mean()))


def summarize(errors) -> ErrorSummary:
    """Summarize a set of angular errors.

    Quartiles for the trimean use linear interpolation at position
    (N-1)*q. Best/worst 25% average the ceil(N/4) smallest and largest
    entries, which stays non-empty for every N >= 1.
    """
    a = np.asarray(errors, dtype=np.float64)
    if a.size == 0:
        raise EmptyInputError("no errors to summarize")
    if (a < 0).any():
        raise NegativeValueError("angular errors are non-negative")
    mean = float(a.mean())
    median = float(np.median(a))
    q1, q3 = np.percentile(a, [25.0, 75.0])
    trimean = float((q1 + 2.0 * median + q3) / 4.0)
    ordered = np.sort(a)
    quarter = -(-a.size // 4)
    best25 = float(ordered[:quarter].mean())
    worst25 = float(ordered[-quarter:].mean())
    avg = geometric_mean([mean, median, trimean, best25, worst25])
    return ErrorSummary(mean=mean, median=median, trimean=trimean,
                        best25=best25, worst25=worst25, avg=avg, count=a.size)


@dataclass(frozen=True)
class SaeResult:
    """Optimal one-to-one matching between ground truths and estimates."""

    mean_angle: float
    assignment: np.ndarray  # assignment[i] = index of estimate paired with gt i
    cost: np.ndarray        # (M, M) pairwise angles in degrees

    @property
    def total_angle(self) -> float:
        return self.mean_angle * self.assignment.size


def sets_angular_error(gts, ests) -> SaeResult:
    """Minimal mean angle over all one-to-one pairings of the two sets.

    Solved exactly with the Hungarian method; the result measures how
    well the estimate set covers the ground-truth region, not per-image
    accuracy.
    """
    g = np.asarray(gts, dtype=np.float64)
    e = np.asarray(ests, dtype=np.float64)
    if g.ndim != 2 or g.shape[0] == 0:
        raise EmptyInputError("empty ground-truth set")
    if g.shape != e.shape:
        raise LengthMismatchError(
            f"set sizes differ: {g.shape[0]} ground truths, {e.shape[0]} estimates")
    cost = pairwise_angles(g, e)
    rows, cols = linear_sum_assignment(cost)
    mean_angle = float(cost[rows, cols].mean())
    return SaeResult(mean_angle=mean_angle, assignment=cols, cost=cost)


@dataclass(frozen=True)
class Histogram:
    """Fixed-width bins with percentages of the source set per bin."""

    edges: np.ndarray     # (B + 1,) bin boundaries in degrees
    percents: np.ndarray  # (B,) percentages, summing to 100

    def rows(self):
        for i, pct in enumerate(self.percents):
            yield (float(self.edges[i]), float(self.edges[i + 1]), float(pct))


def nearest_angles(from_set, to_set) -> np.ndarray:
    """Angle from each element of ``from_set`` to its closest element of
    ``to_set``. Not symmetric in its arguments."""
    f = np.asarray(from_set, dtype=np.float64)
    t = np.asarray(to_set, dtype=np.float64)
    if f.ndim != 2 or f.shape[0] == 0 or t.ndim != 2 or t.shape[0] == 0:
        raise EmptyInputError("both sets must be non-empty")
    return pairwise_angles(f, t).min(axis=1)


def nearest_angle_histogram(from_set, to_set, bin_width: float) -> Histogram:
    """Histogram of nearest angles, normalized to percentages."""
    if bin_width <= 0:
        raise InvalidConfigError(f"bin width must be positive, got {bin_width}")
    angles = nearest_angles(from_set, to_set)
    n_bins = max(1, math.ceil(angles.max() / bin_width))
    edges = np.arange(n_bins + 1, dtype=np.float64) * bin_width
    counts, _ = np.histogram(angles, bins=edges)
    return Histogram(edges=edges, percents=counts * (100.0 / angles.size))


def angular_errors(estimates, gts) -> np.ndarray:
    """Element-wise angles between paired estimates and ground truths."""
    e = np.asarray(estimates, dtype=np.float64)
    g = np.asarray(gts, dtype=np.float64)
    if e.shape != g.shape:
        raise LengthMismatchError(
            f"paired sets differ in size: {e.shape} vs {g.shape}")
    unit_e = e / np.linalg.norm(e, axis=1)[:, None]
    unit_g = g / np.linalg.norm(g, axis=1)[:, None]
    dots = np.clip((unit_e * unit_g).sum(axis=1), -1.0, 1.0)
    return np.degrees(np.arccos(dots))

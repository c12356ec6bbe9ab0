"""Spherical k-means over illuminant directions and percentile trimming.

Clustering uses angular distance throughout: points are unit vectors,
assignment goes to the center with the smallest angle, and each center
update is the renormalized arithmetic mean of its assigned unit vectors
(the angular-distance argmin over the unit sphere).
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import normalize_rows, pairwise_angles
from .errors import DegenerateInputError, EmptyInputError, InvalidConfigError

MAX_ITERATIONS = 100


@dataclass(frozen=True)
class ClusterModel:
    centers: np.ndarray  # (k, 3), each row unit norm
    k: int
    iterations_run: int
    seed: int


@dataclass(frozen=True)
class TrimConfig:
    """Trim fraction t in [0, 1) and the center count used while trimming."""

    t: float = 0.3
    k: int = 2

    def __post_init__(self):
        if not 0.0 <= self.t < 1.0:
            raise InvalidConfigError(f"trim fraction must be in [0, 1), got {self.t}")
        if self.k < 1:
            raise InvalidConfigError(f"trim center count must be >= 1, got {self.k}")


def nearest_center_labels(unit_points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Index of the angularly closest center for each unit point.

    Ties break toward the lower index, which keeps runs reproducible.
    """
    # Max cosine equals min angle for unit vectors.
    return np.argmax(unit_points @ centers.T, axis=1)


def _seed_centers(unit_points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++-style seeding weighted by squared angular distance."""
    n = unit_points.shape[0]
    chosen = [int(rng.integers(n))]
    for _ in range(1, k):
        angles = pairwise_angles(unit_points, unit_points[chosen])
        weights = angles.min(axis=1) ** 2
        total = weights.sum()
        if total == 0.0:
            raise DegenerateInputError("remaining points coincide with chosen centers")
        chosen.append(int(rng.choice(n, p=weights / total)))
    return unit_points[chosen].copy()


def spherical_kmeans(points, k: int, seed: int, max_iter: int = MAX_ITERATIONS) -> ClusterModel:
    """Cluster color directions into k centers by angular distance.

    Deterministic for a fixed seed. Stops when assignments are stable or
    after ``max_iter`` update steps. An emptied cluster is reseeded with
    the point farthest from the center it just lost.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise EmptyInputError("no points to cluster")
    if k < 1:
        raise InvalidConfigError(f"center count must be >= 1, got {k}")
    unit = normalize_rows(pts)
    distinct = np.unique(np.round(unit, 12), axis=0).shape[0]
    if distinct < k:
        raise DegenerateInputError(f"{distinct} distinct directions for k={k}")

    rng = np.random.default_rng(seed)
    centers = _seed_centers(unit, k, rng)
    labels = nearest_center_labels(unit, centers)
    iterations = 0
    for _ in range(max_iter):
        iterations += 1
        for j in range(k):
            members = unit[labels == j]
            if members.shape[0] == 0:
                farthest = np.argmin(np.clip(unit @ centers[j], -1.0, 1.0))
                centers[j] = unit[farthest]
            else:
                total = members.sum(axis=0)
                centers[j] = total / np.linalg.norm(total)
        new_labels = nearest_center_labels(unit, centers)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return ClusterModel(centers=centers, k=k, iterations_run=iterations, seed=seed)


def _percentile_rank(q: int, count: int) -> int:
    """1-based nearest-rank index ceil(q/100 * count), at least 1."""
    return max(1, -(-q * count // 100))


def trim(points, cfg: TrimConfig, seed: int) -> np.ndarray:
    """Drop the farthest fraction of points from each provisional cluster.

    Runs spherical k-means with ``cfg.k`` centers, then keeps, within each
    cluster, the points whose angle to the center does not exceed the
    floor(100*(1-t))-th nearest-rank percentile of that cluster's angles.
    Survivors are returned in input order.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise EmptyInputError("no points to trim")
    unit = normalize_rows(pts)
    model = spherical_kmeans(pts, cfg.k, seed)
    angles = pairwise_angles(unit, model.centers)
    labels = angles.argmin(axis=1)
    q = math.floor(100.0 * (1.0 - cfg.t))
    keep = np.zeros(pts.shape[0], dtype=bool)
    for j in range(cfg.k):
        members = np.flatnonzero(labels == j)
        if members.size == 0:
            continue
        member_angles = angles[members, j]
        rank = _percentile_rank(q, members.size)
        cutoff = np.sort(member_angles)[rank - 1]
        keep[members[member_angles <= cutoff]] = True
    return pts[keep]

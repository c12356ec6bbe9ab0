import math

import numpy as np
import pytest

from colortiger.cluster import (
    TrimConfig,
    nearest_center_labels,
    spherical_kmeans,
    trim,
)
from colortiger.core import angular_distance, normalize, normalize_rows, pairwise_angles
from colortiger.errors import DegenerateInputError, EmptyInputError, InvalidConfigError

from helpers import rotate_from, trim_fixture

WARM = normalize((1.0, 0.8, 0.6))
COOL = normalize((0.6, 0.8, 1.0))


def bundle(mode, count, spread_deg, rng):
    return np.stack([
        rotate_from(mode, abs(rng.normal(0.0, spread_deg)), rng.uniform(0, 2 * math.pi))
        for _ in range(count)
    ])


def match_centers(centers, modes):
    """Pair each center with its closest mode; both pairings must be distinct."""
    angles = pairwise_angles(centers, modes)
    order = angles.argmin(axis=1)
    assert set(order) == {0, 1}, "both centers collapsed onto one mode"
    return [angles[i, order[i]] for i in range(2)]


def test_two_bundles_recover_normalized_means():
    rng = np.random.default_rng(100)
    a = bundle(WARM, 50, 1.0, rng)
    b = bundle(COOL, 50, 1.0, rng)
    model = spherical_kmeans(np.vstack([a, b]), 2, seed=5)
    # Oracle: the analytic center of each bundle is its renormalized mean.
    expected = [normalize(a.sum(axis=0)), normalize(b.sum(axis=0))]
    for target in expected:
        best = min(angular_distance(c, target) for c in model.centers)
        assert best < 0.5


def test_identical_points_k1():
    pts = np.tile(normalize((0.2, 0.5, 0.8)), (10, 1))
    model = spherical_kmeans(pts, 1, seed=0)
    np.testing.assert_allclose(model.centers[0], pts[0], atol=1e-12)


def test_determinism_bit_identical():
    rng = np.random.default_rng(101)
    pts = np.vstack([bundle(WARM, 30, 2.0, rng), bundle(COOL, 30, 2.0, rng)])
    first = spherical_kmeans(pts, 2, seed=99)
    second = spherical_kmeans(pts, 2, seed=99)
    np.testing.assert_array_equal(first.centers, second.centers)
    assert first.iterations_run == second.iterations_run


def test_center_parallel_to_member_sum():
    rng = np.random.default_rng(102)
    pts = np.vstack([bundle(WARM, 40, 3.0, rng), bundle(COOL, 40, 3.0, rng)])
    model = spherical_kmeans(pts, 2, seed=7)
    unit = normalize_rows(pts)
    labels = nearest_center_labels(unit, model.centers)
    for j in range(2):
        member_sum = unit[labels == j].sum(axis=0)
        assert angular_distance(model.centers[j], member_sum) < 1e-9


def test_mode_separation_recovery():
    # Modes at least 15 degrees apart with tight spread land within 2 degrees.
    rng = np.random.default_rng(103)
    mode_a = rotate_from(WARM, 0.0, 0.0)
    mode_b = rotate_from(WARM, 16.0, 0.3)
    pts = np.vstack([bundle(mode_a, 60, 1.5, rng), bundle(mode_b, 60, 1.5, rng)])
    model = spherical_kmeans(pts, 2, seed=21)
    gaps = match_centers(model.centers, np.stack([mode_a, mode_b]))
    assert max(gaps) < 2.0


def test_empty_input_and_degenerate():
    with pytest.raises(EmptyInputError):
        spherical_kmeans(np.zeros((0, 3)), 2, seed=0)
    same = np.tile(normalize((1, 1, 1)), (5, 1))
    with pytest.raises(DegenerateInputError):
        spherical_kmeans(same, 2, seed=0)


def test_scaled_duplicates_count_as_one_direction():
    pts = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.5, 1.0, 1.5]])
    with pytest.raises(DegenerateInputError):
        spherical_kmeans(pts, 2, seed=0)


def test_trim_removes_outliers_keeps_fourteen():
    pts, outlier_indices = trim_fixture()
    kept = trim(pts, TrimConfig(t=0.3, k=2), seed=4)
    assert kept.shape[0] == 14
    kept_rows = {tuple(row) for row in kept}
    for idx in outlier_indices:
        assert tuple(pts[idx]) not in kept_rows


def test_trim_matches_hand_percentile_oracle():
    # Recompute the keep set from the same provisional clustering with the
    # nearest-rank rule applied by hand on each cluster's sorted angles.
    pts, _ = trim_fixture()
    seed = 4
    model = spherical_kmeans(pts, 2, seed=seed)
    angles = pairwise_angles(pts, model.centers)
    labels = angles.argmin(axis=1)
    expected = []
    q = math.floor(100 * (1 - 0.3))
    for j in range(2):
        idx = np.flatnonzero(labels == j)
        cluster_angles = sorted(angles[i, j] for i in idx)
        rank = math.ceil(q * len(idx) / 100)
        cutoff = cluster_angles[rank - 1]
        expected.extend(i for i in idx if angles[i, j] <= cutoff)
    expected_rows = pts[sorted(expected)]
    kept = trim(pts, TrimConfig(t=0.3, k=2), seed=seed)
    np.testing.assert_array_equal(kept, expected_rows)


def test_trim_zero_fraction_keeps_all():
    pts, _ = trim_fixture()
    kept = trim(pts, TrimConfig(t=0.0, k=2), seed=4)
    np.testing.assert_array_equal(kept, pts)


def test_trim_cut_is_a_clean_percentile_split():
    # Every removed point sits at least as far from its center as any kept one.
    pts, _ = trim_fixture()
    seed = 4
    kept = trim(pts, TrimConfig(t=0.3, k=2), seed=seed)
    model = spherical_kmeans(pts, 2, seed=seed)
    angles = pairwise_angles(pts, model.centers)
    labels = angles.argmin(axis=1)
    kept_rows = {tuple(row) for row in kept}
    for j in range(2):
        member_angles = [(angles[i, j], tuple(pts[i]))
                         for i in np.flatnonzero(labels == j)]
        kept_angles = [a for a, row in member_angles if row in kept_rows]
        removed_angles = [a for a, row in member_angles if row not in kept_rows]
        if removed_angles:
            assert min(removed_angles) >= max(kept_angles)


def test_trim_never_increases_worst_angle():
    rng = np.random.default_rng(104)
    pts = np.vstack([bundle(WARM, 25, 4.0, rng), bundle(COOL, 25, 4.0, rng)])
    seed = 9
    model = spherical_kmeans(pts, 2, seed=seed)
    before = pairwise_angles(pts, model.centers).min(axis=1).max()
    kept = trim(pts, TrimConfig(t=0.2, k=2), seed=seed)
    after = pairwise_angles(kept, model.centers).min(axis=1).max()
    assert after <= before + 1e-12


def test_trim_output_is_submultiset():
    rng = np.random.default_rng(105)
    pts = np.vstack([bundle(WARM, 20, 3.0, rng), bundle(COOL, 20, 3.0, rng)])
    kept = trim(pts, TrimConfig(t=0.4, k=2), seed=2)
    pool = [tuple(row) for row in pts]
    for row in kept:
        pool.remove(tuple(row))  # raises if kept more copies than supplied


def test_trim_config_validation():
    with pytest.raises(InvalidConfigError):
        TrimConfig(t=1.0)
    with pytest.raises(InvalidConfigError):
        TrimConfig(t=-0.1)
    with pytest.raises(EmptyInputError):
        trim(np.zeros((0, 3)), TrimConfig(), seed=0)

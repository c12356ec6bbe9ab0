"""Shared construction helpers for the test suite."""

import math

import numpy as np

from colortiger.core import LinearImage, normalize


def tangent_basis(direction):
    d = normalize(direction)
    helper = np.zeros(3)
    helper[int(np.argmin(np.abs(d)))] = 1.0
    u = np.cross(d, helper)
    u /= np.linalg.norm(u)
    v = np.cross(d, u)
    return d, u, v


def rotate_from(direction, angle_deg, azimuth_rad):
    """Unit vector at a given angle from ``direction``, rotated about the
    tangent direction selected by ``azimuth_rad``."""
    d, u, v = tangent_basis(direction)
    theta = math.radians(angle_deg)
    out = math.cos(theta) * d + math.sin(theta) * (
        math.cos(azimuth_rad) * u + math.sin(azimuth_rad) * v)
    return normalize(np.clip(out, 0.0, None))


def random_image(rng, height=8, width=8, scale=1.0):
    """Random strictly positive linear image with an all-valid mask."""
    pixels = (1.0 - rng.random((height, width, 3))) * scale
    return LinearImage.from_pixels(pixels)


def image_from_rows(rows):
    """Single-row image from a list of RGB triplets."""
    px = np.asarray(rows, dtype=np.float64).reshape(1, -1, 3)
    return LinearImage.from_pixels(px)


def trim_fixture():
    """Two clusters of 10 points each, one 30-degree outlier per cluster.

    Inliers sit within a few degrees of their warm or cool mode; the
    outliers rotate out of the plane spanned by the two modes so each
    stays assigned to its own cluster.
    """
    warm = normalize((1.0, 0.8, 0.6))
    cool = normalize((0.6, 0.8, 1.0))
    out_of_plane = math.pi / 2
    inlier_angles = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0]
    points = []
    outlier_indices = []
    for mode in (warm, cool):
        for i, ang in enumerate(inlier_angles):
            points.append(rotate_from(mode, ang, 0.7 * i))
        outlier_indices.append(len(points))
        points.append(rotate_from(mode, 30.0, out_of_plane))
    return np.stack(points), outlier_indices

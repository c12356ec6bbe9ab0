"""Color-vector math shared by all modules.

An illuminant is a direction in linear RGB space: only its chromaticity
matters for white balancing, so estimates are stored L2-normalized and
compared by the angle between them.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NoValidPixelsError, ZeroChannelError, ZeroVectorError


class Chromaticity(NamedTuple):
    """Projective rb coordinates: r = R/(R+G+B), b = B/(R+G+B)."""

    r: float
    b: float


def normalize(v) -> np.ndarray:
    """Return the unit vector parallel to ``v``.

    Raises ZeroVectorError when all channels are zero; negative channels
    are rejected because sensor responses are non-negative.
    """
    a = np.asarray(v, dtype=np.float64)
    if a.shape != (3,):
        raise ValueError(f"expected an RGB triplet, got shape {a.shape}")
    if (a < 0).any():
        raise ValueError("negative channel in color vector")
    n = float(np.linalg.norm(a))
    if n == 0.0:
        raise ZeroVectorError("cannot normalize the zero vector")
    return a / n


def normalize_rows(points) -> np.ndarray:
    """L2-normalize every row of an (N, 3) array of color vectors."""
    a = np.asarray(points, dtype=np.float64)
    if a.ndim != 2 or a.shape[1] != 3:
        raise ValueError(f"expected an (N, 3) array, got shape {a.shape}")
    norms = np.linalg.norm(a, axis=1)
    if (norms == 0.0).any():
        raise ZeroVectorError("zero vector among color points")
    return a / norms[:, None]


def angular_distance(a, b) -> float:
    """Angle between two color directions, in degrees.

    The dot product is clamped to [-1, 1] before arccos so rounding can
    never produce NaN. Symmetric, scale invariant, in [0, 180].
    """
    ua = normalize(a)
    ub = normalize(b)
    d = float(np.clip(ua @ ub, -1.0, 1.0))
    return float(np.degrees(np.arccos(d)))


def pairwise_angles(a_set, b_set) -> np.ndarray:
    """Angles in degrees between every row of ``a_set`` and every row of ``b_set``."""
    ua = normalize_rows(a_set)
    ub = normalize_rows(b_set)
    dots = np.clip(ua @ ub.T, -1.0, 1.0)
    return np.degrees(np.arccos(dots))


def rb_chromaticity(v) -> Chromaticity:
    """Project a color vector onto the rb-chromaticity plane."""
    a = np.asarray(v, dtype=np.float64)
    if a.shape != (3,):
        raise ValueError(f"expected an RGB triplet, got shape {a.shape}")
    s = float(a.sum())
    if s == 0.0:
        raise ZeroVectorError("chromaticity of the zero vector is undefined")
    return Chromaticity(float(a[0] / s), float(a[2] / s))


@dataclass(frozen=True)
class LinearImage:
    """A grid of linear RGB pixels with a per-pixel validity mask.

    ``pixels`` is (H, W, 3) float64 of black-level-subtracted responses;
    ``valid`` is (H, W) bool, False for saturated or masked pixels. Both
    arrays are frozen read-only so images can be shared across threads.
    """

    pixels: np.ndarray
    valid: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"pixels must be (H, W, 3), got shape {px.shape}")
        if px.shape[0] * px.shape[1] == 0:
            raise ValueError("image must contain at least one pixel")
        if (px < 0).any():
            raise ValueError("negative pixel value in linear image")
        mask = np.asarray(self.valid, dtype=bool)
        if mask.shape != px.shape[:2]:
            raise ValueError("valid mask shape must match the pixel grid")
        px = px.copy()
        mask = mask.copy()
        px.flags.writeable = False
        mask.flags.writeable = False
        object.__setattr__(self, "pixels", px)
        object.__setattr__(self, "valid", mask)

    @classmethod
    def from_pixels(cls, pixels, valid=None) -> "LinearImage":
        """Build an image, defaulting to an all-valid mask."""
        px = np.asarray(pixels, dtype=np.float64)
        if valid is None:
            valid = np.ones(px.shape[:2], dtype=bool)
        return cls(px, valid)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def valid_pixels(self) -> np.ndarray:
        """Return the (N, 3) array of valid pixels; raises if none remain."""
        px = self.pixels[self.valid]
        if px.shape[0] == 0:
            raise NoValidPixelsError("image has no valid pixel")
        return px


def apply_white_balance(img: LinearImage, e) -> LinearImage:
    """Von Kries correction: divide each channel by the illuminant channel.

    The divisor is rescaled so the green gain is 1, keeping exposure
    stable. Invalid pixels pass through unchanged and stay flagged.
    """
    illum = np.asarray(e, dtype=np.float64)
    if illum.shape != (3,):
        raise ValueError(f"expected an RGB triplet, got shape {illum.shape}")
    if (illum <= 0).any():
        raise ZeroChannelError("white balance needs strictly positive channels")
    divisor = illum / illum[1]
    corrected = np.where(img.valid[:, :, None], img.pixels / divisor, img.pixels)
    return LinearImage(corrected, img.valid)

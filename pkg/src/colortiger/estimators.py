"""Statistics-based per-image illuminant estimators.

All estimators operate on the valid pixels only, return unit-norm
directions, and are invariant to uniform rescaling of the image.
"""

import numpy as np

from .core import LinearImage, normalize
from .errors import InvalidConfigError, ZeroVectorError

DEFAULT_SWEEP_POWER = 8


def gray_world(img: LinearImage) -> np.ndarray:
    """Normalized per-channel arithmetic mean over valid pixels."""
    px = img.valid_pixels()
    mean = px.mean(axis=0)
    if not (mean > 0).any():
        raise ZeroVectorError("all valid pixels are black")
    return normalize(mean)


def white_patch(img: LinearImage) -> np.ndarray:
    """Normalized per-channel maximum over valid pixels."""
    px = img.valid_pixels()
    peak = px.max(axis=0)
    if not (peak > 0).any():
        raise ZeroVectorError("all valid pixels are black")
    return normalize(peak)


def shades_of_gray(img: LinearImage, p: int) -> np.ndarray:
    """Normalized per-channel Minkowski p-mean over valid pixels.

    p=1 reduces to the gray-world mean and large p approaches the
    white-patch maximum. Channels are rescaled by their valid maximum
    before exponentiation so high powers on 16-bit data cannot overflow.
    """
    if p < 1:
        raise InvalidConfigError(f"Minkowski power must be >= 1, got {p}")
    px = img.valid_pixels()
    peak = px.max(axis=0)
    if not (peak > 0).any():
        raise ZeroVectorError("all valid pixels are black")
    # Zero-max channels contribute a zero component; the guard only avoids 0/0.
    safe_peak = np.where(peak > 0, peak, 1.0)
    ratios = px / safe_peak
    mink = np.power(np.power(ratios, p).mean(axis=0), 1.0 / p)
    return normalize(peak * mink)


def sog_sweep(img: LinearImage, n: int = DEFAULT_SWEEP_POWER) -> np.ndarray:
    """Stack of shades-of-gray estimates for powers 1..n, one per row."""
    if n < 1:
        raise InvalidConfigError(f"sweep upper power must be >= 1, got {n}")
    return np.stack([shades_of_gray(img, p) for p in range(1, n + 1)])

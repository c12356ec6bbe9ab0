"""Two-center unsupervised illuminant models.

Training clusters a pooled sweep of shades-of-gray estimates, after
trimming outliers, into a warm and a cool center. Application votes one
of the two centers using the gray-world and white-patch estimates of the
image at hand. The cross-sensor variant additionally learns per-channel
sensor gains as channel-wise medians of the pooled estimates and moves
all colors through a gain-neutral space.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence, Union

import numpy as np

from .cluster import TrimConfig, spherical_kmeans, trim
from .core import LinearImage, normalize, normalize_rows, rb_chromaticity
from .errors import EmptyInputError, ModelFormatError
from .estimators import DEFAULT_SWEEP_POWER, gray_world, sog_sweep, white_patch
from .parallel import ordered_map

DEFAULT_TRIM_FRACTION = 0.3
MODEL_FORMAT_VERSION = 1


class GainTriplet(NamedTuple):
    """Per-channel sensor gains; only their direction matters downstream."""

    g_r: float
    g_g: float
    g_b: float

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=np.float64)

    @classmethod
    def from_array(cls, a) -> "GainTriplet":
        r, g, b = np.asarray(a, dtype=np.float64)
        return cls(float(r), float(g), float(b))


@dataclass(frozen=True)
class TigerModel:
    """Two learned centers, warm first, plus the training configuration."""

    centers: np.ndarray  # (2, 3), unit rows, larger r-chromaticity first
    n: int = DEFAULT_SWEEP_POWER
    t: float = DEFAULT_TRIM_FRACTION
    seed: int = 0
    provenance: str = ""

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=np.float64)
        if centers.shape != (2, 3):
            raise ValueError(f"expected two centers, got shape {centers.shape}")
        centers = centers.copy()
        centers.flags.writeable = False
        object.__setattr__(self, "centers", centers)


@dataclass(frozen=True)
class BengalModel(TigerModel):
    """Gain-neutral centers bracketed by source and target sensor gains."""

    source_gains: GainTriplet = field(default=GainTriplet(1.0, 1.0, 1.0))
    target_gains: GainTriplet = field(default=GainTriplet(1.0, 1.0, 1.0))


def pooled_sweep(images: Sequence[LinearImage], n: int = DEFAULT_SWEEP_POWER,
                 workers: int = 1) -> np.ndarray:
    """Stack sweep estimates for all images, image-major, power-minor."""
    if len(images) == 0:
        raise EmptyInputError("no images to pool")
    sweeps = ordered_map(lambda img: sog_sweep(img, n), images, workers)
    return np.vstack(sweeps)


def order_warm_first(centers: np.ndarray) -> np.ndarray:
    """Sort two centers so the larger r-chromaticity comes first."""
    if rb_chromaticity(centers[0]).r >= rb_chromaticity(centers[1]).r:
        return centers
    return centers[::-1].copy()


def cluster_estimate_pool(pool, t: float, seed: int) -> np.ndarray:
    """Trim an estimate pool and cluster the survivors into two centers."""
    survivors = trim(pool, TrimConfig(t=t, k=2), seed)
    model = spherical_kmeans(survivors, 2, seed)
    return order_warm_first(model.centers)


def train_color_tiger(images: Sequence[LinearImage], n: int = DEFAULT_SWEEP_POWER,
                      t: float = DEFAULT_TRIM_FRACTION, seed: int = 0,
                      provenance: str = "", workers: int = 1) -> TigerModel:
    """Learn the two centers from images without any ground truth."""
    pool = pooled_sweep(images, n, workers)
    centers = cluster_estimate_pool(pool, t, seed)
    return TigerModel(centers=centers, n=n, t=t, seed=seed, provenance=provenance)


def vote(centers: np.ndarray, e_gw, e_wp) -> int:
    """Pick the center with the largest cosine-sum vote of the two estimates.

    An exact tie resolves to index 0, the warm center.
    """
    unit_centers = normalize_rows(centers)
    scores = unit_centers @ normalize(e_gw) + unit_centers @ normalize(e_wp)
    return int(np.argmax(scores))


def apply_color_tiger(img: LinearImage, model: TigerModel) -> np.ndarray:
    """Estimate the illuminant of one image as one of the learned centers."""
    choice = vote(model.centers, gray_world(img), white_patch(img))
    return model.centers[choice].copy()


def gains_from_estimates(pool) -> GainTriplet:
    """Channel-wise medians of normalized estimates, renormalized.

    The median is robust to the outlier estimates the sweep introduces,
    so no trimming is applied here.
    """
    unit = normalize_rows(pool)
    if unit.shape[0] == 0:
        raise EmptyInputError("no estimates to take medians over")
    medians = np.median(unit, axis=0)
    return GainTriplet.from_array(normalize(medians))


def learn_gains(images: Sequence[LinearImage], n: int = DEFAULT_SWEEP_POWER,
                workers: int = 1) -> GainTriplet:
    """Estimate per-channel sensor gains from uncalibrated images."""
    return gains_from_estimates(pooled_sweep(images, n, workers))


def train_color_bengal_tiger(train_images: Sequence[LinearImage],
                             target_images: Sequence[LinearImage],
                             n: int = DEFAULT_SWEEP_POWER,
                             t: float = DEFAULT_TRIM_FRACTION, seed: int = 0,
                             provenance: str = "", workers: int = 1) -> BengalModel:
    """Learn gain-neutral centers from one sensor for use on another.

    Gains are learned independently for the training and the target
    sensor; the training pool is divided by the source gains before
    trimming and clustering, so the centers live in gain-neutral space.
    """
    if len(train_images) == 0 or len(target_images) == 0:
        raise EmptyInputError("both image sets must be non-empty")
    source_gains = learn_gains(train_images, n, workers)
    target_gains = learn_gains(target_images, n, workers)
    pool = pooled_sweep(train_images, n, workers)
    neutral = normalize_rows(pool / source_gains.as_array())
    centers = cluster_estimate_pool(neutral, t, seed)
    return BengalModel(centers=centers, n=n, t=t, seed=seed, provenance=provenance,
                       source_gains=source_gains, target_gains=target_gains)


def apply_color_bengal_tiger(img: LinearImage, model: BengalModel) -> np.ndarray:
    """Vote in gain-neutral space, then rescale the winner by the target gains."""
    gains = model.target_gains.as_array()
    e_gw = normalize(gray_world(img) / gains)
    e_wp = normalize(white_patch(img) / gains)
    choice = vote(model.centers, e_gw, e_wp)
    return normalize(model.centers[choice] * gains)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def save_model(model: TigerModel, path) -> None:
    """Write a model as flat key-value text that round-trips exactly."""
    lines = [
        f"format_version {MODEL_FORMAT_VERSION}",
        f"method {'cbt' if isinstance(model, BengalModel) else 'ct'}",
        f"n {model.n}",
        f"t {_fmt(model.t)}",
        f"seed {model.seed}",
    ]
    if model.provenance:
        lines.append(f"provenance {model.provenance}")
    for i in range(2):
        lines.append(f"center{i} " + " ".join(_fmt(c) for c in model.centers[i]))
    if isinstance(model, BengalModel):
        lines.append("gains_source " + " ".join(_fmt(g) for g in model.source_gains))
        lines.append("gains_target " + " ".join(_fmt(g) for g in model.target_gains))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_triplet(fields: dict, key: str) -> np.ndarray:
    if key not in fields:
        raise ModelFormatError(f"model file is missing '{key}'")
    parts = fields[key].split()
    if len(parts) != 3:
        raise ModelFormatError(f"'{key}' must hold three values")
    try:
        return np.array([float(p) for p in parts])
    except ValueError as exc:
        raise ModelFormatError(f"'{key}' holds a non-numeric value") from exc


def load_model(path) -> Union[TigerModel, BengalModel]:
    """Read a model file, validating version and method before anything else."""
    fields = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line:
            continue
        key, _, value = line.partition(" ")
        fields[key] = value.strip()
    if fields.get("format_version") != str(MODEL_FORMAT_VERSION):
        raise ModelFormatError(
            f"unsupported format_version {fields.get('format_version')!r}")
    method = fields.get("method")
    if method not in ("ct", "cbt"):
        raise ModelFormatError(f"unknown method {method!r}")
    try:
        n = int(fields["n"])
        t = float(fields["t"])
        seed = int(fields["seed"])
    except (KeyError, ValueError) as exc:
        raise ModelFormatError("model file is missing or corrupts n/t/seed") from exc
    centers = np.stack([_parse_triplet(fields, "center0"),
                        _parse_triplet(fields, "center1")])
    provenance = fields.get("provenance", "")
    if method == "ct":
        return TigerModel(centers=centers, n=n, t=t, seed=seed, provenance=provenance)
    return BengalModel(
        centers=centers, n=n, t=t, seed=seed, provenance=provenance,
        source_gains=GainTriplet.from_array(_parse_triplet(fields, "gains_source")),
        target_gains=GainTriplet.from_array(_parse_triplet(fields, "gains_target")),
    )

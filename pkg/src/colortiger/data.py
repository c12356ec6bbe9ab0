"""Dataset ingestion, preprocessing, cross-validation folds, and the
synthetic multi-sensor corpus generator.

Canonical on-disk formats: 16-bit binary PPM (P6, maxval 65535,
big-endian samples) for images, and a comma-separated manifest with
header ``path,r,g,b`` or ``path,r,g,b,r2,g2,b2`` for ground truths.
"""

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .core import LinearImage, normalize
from .errors import (
    AllPixelsInvalidError,
    EmptyImageError,
    InvalidConfigError,
    InvalidGroundTruthError,
    MissingImageError,
    ParseError,
    TooFewEntriesError,
    ZeroVectorError,
)
from .tiger import GainTriplet

PPM_MAXVAL = 65535
# Leaves headroom below the 16-bit ceiling so written pixels never look saturated.
_WRITE_PEAK = 60000.0


@dataclass(frozen=True)
class CubeProfile:
    """Preprocessing constants for the single-camera benchmark layout."""

    black_level: int = 2048
    saturation_margin: int = 2
    mask_row: int = 1050
    mask_col: int = 2050


@dataclass(frozen=True)
class ManifestEntry:
    path: Path
    ground_truth: np.ndarray
    second_ground_truth: Optional[np.ndarray] = None


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple
    profile: str = "none"

    def __len__(self) -> int:
        return len(self.entries)

    def ground_truths(self) -> np.ndarray:
        return np.stack([e.ground_truth for e in self.entries])


def _read_pnm_token(stream) -> bytes:
    """Next whitespace-delimited header token, skipping # comments."""
    token = b""
    while True:
        ch = stream.read(1)
        if ch == b"":
            raise ParseError("unexpected end of PPM header")
        if ch == b"#":
            while ch not in (b"\n", b""):
                ch = stream.read(1)
            continue
        if ch.isspace():
            if token:
                return token
            continue
        token += ch


def read_ppm(path) -> np.ndarray:
    """Read a binary PPM into an (H, W, 3) uint16 array."""
    path = Path(path)
    with path.open("rb") as f:
        magic = f.read(2)
        if magic != b"P6":
            raise ParseError(f"{path}: not a binary PPM (magic {magic!r})")
        try:
            width = int(_read_pnm_token(f))
            height = int(_read_pnm_token(f))
            maxval = int(_read_pnm_token(f))
        except ValueError as exc:
            raise ParseError(f"{path}: malformed PPM header") from exc
        if width <= 0 or height <= 0:
            raise ParseError(f"{path}: invalid dimensions {width}x{height}")
        if not 0 < maxval <= PPM_MAXVAL:
            raise ParseError(f"{path}: unsupported maxval {maxval}")
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        count = width * height * 3
        raw = f.read(count * dtype.itemsize)
    if len(raw) != count * dtype.itemsize:
        raise ParseError(f"{path}: truncated pixel data")
    data = np.frombuffer(raw, dtype=dtype).reshape(height, width, 3)
    return data.astype(np.uint16)


def write_ppm(path, pixels: np.ndarray) -> None:
    """Write an (H, W, 3) array of 16-bit samples as big-endian P6."""
    a = np.asarray(pixels)
    if a.ndim != 3 or a.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) pixels, got shape {a.shape}")
    if a.min() < 0 or a.max() > PPM_MAXVAL:
        raise ValueError("sample values outside the 16-bit range")
    header = f"P6\n{a.shape[1]} {a.shape[0]}\n{PPM_MAXVAL}\n".encode("ascii")
    Path(path).write_bytes(header + a.astype(">u2").tobytes())


def _parse_ground_truth(parts, line_no: int) -> np.ndarray:
    try:
        triplet = np.array([float(p) for p in parts], dtype=np.float64)
    except ValueError as exc:
        raise ParseError(f"line {line_no}: non-numeric ground truth") from exc
    if (triplet < 0).any():
        raise InvalidGroundTruthError(f"line {line_no}: negative ground-truth channel")
    try:
        return normalize(triplet)
    except ZeroVectorError as exc:
        raise InvalidGroundTruthError(f"line {line_no}: zero ground truth") from exc


def load_manifest(path, profile: str = "none") -> DatasetManifest:
    """Load and validate a manifest, resolving image paths against its
    directory and checking that every referenced image exists."""
    path = Path(path)
    base = path.parent
    with path.open("r", encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise ParseError(f"{path}: empty manifest")
    header = [h.strip() for h in rows[0]]
    if header not in (["path", "r", "g", "b"],
                      ["path", "r", "g", "b", "r2", "g2", "b2"]):
        raise ParseError(f"{path}: unrecognized header {header}")
    entries = []
    seen = set()
    for line_no, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(f"line {line_no}: expected {len(header)} fields, got {len(row)}")
        rel = row[0].strip()
        if not rel:
            raise ParseError(f"line {line_no}: empty image path")
        if rel in seen:
            raise ParseError(f"line {line_no}: duplicate image path {rel!r}")
        seen.add(rel)
        image_path = (base / rel).resolve()
        if not image_path.is_file():
            raise MissingImageError(f"line {line_no}: missing image {image_path}")
        gt = _parse_ground_truth(row[1:4], line_no)
        second = None
        if len(header) == 7 and any(p.strip() for p in row[4:7]):
            second = _parse_ground_truth(row[4:7], line_no)
        entries.append(ManifestEntry(image_path, gt, second))
    if not entries:
        raise ParseError(f"{path}: manifest has no entries")
    return DatasetManifest(entries=tuple(entries), profile=profile)


def save_manifest(manifest: DatasetManifest, path) -> None:
    """Write a manifest with full-precision ground truths and LF endings."""
    has_second = any(e.second_ground_truth is not None for e in manifest.entries)
    with Path(path).open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        header = ["path", "r", "g", "b"]
        if has_second:
            header += ["r2", "g2", "b2"]
        writer.writerow(header)
        for entry in manifest.entries:
            row = [str(entry.path)] + [format(v, ".17g") for v in entry.ground_truth]
            if has_second:
                second = entry.second_ground_truth
                row += [format(v, ".17g") for v in second] if second is not None else ["", "", ""]
            writer.writerow(row)


def preprocess(raw, profile: CubeProfile) -> LinearImage:
    """Turn a raw 16-bit grid into a masked linear image.

    The black level is subtracted with clamping at zero. Saturation is
    judged on the raw values: any channel at or above m - margin, where m
    is the image-wide maximum, invalidates the pixel. The calibration
    object is removed by invalidating the rectangle at row >= mask_row
    and column >= mask_col, both 0-based.
    """
    a = np.asarray(raw)
    if a.ndim != 3 or a.shape[2] != 3:
        raise EmptyImageError(f"expected (H, W, 3) raw data, got shape {a.shape}")
    if a.shape[0] * a.shape[1] == 0:
        raise EmptyImageError("raw image has no pixels")
    peak = int(a.max())
    saturated = (a.astype(np.int64) >= peak - profile.saturation_margin).any(axis=2)
    masked = np.zeros(a.shape[:2], dtype=bool)
    masked[profile.mask_row:, profile.mask_col:] = True
    valid = ~(saturated | masked)
    if not valid.any():
        raise AllPixelsInvalidError("preprocessing left no valid pixel")
    pixels = np.maximum(a.astype(np.float64) - profile.black_level, 0.0)
    return LinearImage(pixels, valid)


def load_image(path, profile: str = "none") -> LinearImage:
    """Read an image file and apply the named preprocessing profile."""
    raw = read_ppm(path)
    if profile == "none":
        return LinearImage.from_pixels(raw.astype(np.float64))
    if profile == "cube":
        return preprocess(raw, CubeProfile())
    raise InvalidConfigError(f"unknown preprocessing profile {profile!r}")


def kfold_indices(count: int, k: int, seed: int) -> list:
    """Seeded shuffle split of range(count) into k folds, sizes within 1."""
    if k < 2:
        raise InvalidConfigError(f"fold count must be >= 2, got {k}")
    if count < k:
        raise TooFewEntriesError(f"{count} entries cannot fill {k} folds")
    order = np.random.default_rng(seed).permutation(count)
    return [fold.copy() for fold in np.array_split(order, k)]


def kfold(manifest: DatasetManifest, k: int, seed: int) -> list:
    """Fold index arrays over the manifest entries."""
    return kfold_indices(len(manifest.entries), k, seed)


@dataclass(frozen=True)
class SynthConfig:
    """Two-mode synthetic corpus parameters.

    Each image draws one illuminant from a warm/cool mixture with angular
    jitter, renders independent uniform reflectances under the diagonal
    sensor-gain model, and records the drawn illuminant as ground truth.
    A fraction of images receives a strong chromatic reflectance cast
    that drives statistics-based estimates far off, exercising trimming.
    """

    image_count: int
    pixels_per_image: int
    mode_a: tuple = (1.0, 0.9, 0.7)
    mode_b: tuple = (0.7, 0.9, 1.0)
    mode_spread: float = 2.0      # degrees
    mode_mix: float = 0.5         # probability of the warm mode
    gains: GainTriplet = GainTriplet(1.0, 1.0, 1.0)
    noise_sigma: float = 0.0      # relative multiplicative pixel noise
    outlier_fraction: float = 0.0
    seed: int = 0

    def validate(self) -> None:
        if self.image_count < 1 or self.pixels_per_image < 1:
            raise InvalidConfigError("image and pixel counts must be >= 1")
        if not 0.0 <= self.mode_mix <= 1.0:
            raise InvalidConfigError(f"mode_mix must be in [0, 1], got {self.mode_mix}")
        if not 0.0 <= self.outlier_fraction <= 1.0:
            raise InvalidConfigError(
                f"outlier_fraction must be in [0, 1], got {self.outlier_fraction}")
        if self.mode_spread < 0:
            raise InvalidConfigError(f"mode_spread must be >= 0, got {self.mode_spread}")
        if self.noise_sigma < 0:
            raise InvalidConfigError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if any(g <= 0 for g in self.gains):
            raise InvalidConfigError("gains must be strictly positive")
        normalize(np.asarray(self.mode_a, dtype=np.float64))
        normalize(np.asarray(self.mode_b, dtype=np.float64))


def _tangent_basis(direction: np.ndarray):
    helper = np.zeros(3)
    helper[int(np.argmin(np.abs(direction)))] = 1.0
    u = np.cross(direction, helper)
    u /= np.linalg.norm(u)
    v = np.cross(direction, u)
    return u, v


def _jitter_direction(mode: np.ndarray, spread_deg: float,
                      rng: np.random.Generator) -> np.ndarray:
    """Rotate a unit direction by a normal angle about a uniform tangent axis."""
    theta = math.radians(rng.normal(0.0, spread_deg))
    phi = rng.uniform(0.0, 2.0 * math.pi)
    if theta == 0.0:
        return mode.copy()
    u, v = _tangent_basis(mode)
    jittered = math.cos(theta) * mode + math.sin(theta) * (
        math.cos(phi) * u + math.sin(phi) * v)
    return normalize(np.maximum(jittered, 0.0))


# Per-channel range of the chromatic cast applied to outlier images.
_OUTLIER_TINT_LOW = 0.25


def synth_dataset(cfg: SynthConfig):
    """Generate a synthetic corpus.

    Returns ``(images, manifest, gains)`` where the manifest carries the
    drawn scene illuminants as ground truth (gains are not baked into the
    ground truth; the true gains are returned alongside).
    """
    cfg.validate()
    mode_a = normalize(np.asarray(cfg.mode_a, dtype=np.float64))
    mode_b = normalize(np.asarray(cfg.mode_b, dtype=np.float64))
    gains = cfg.gains.as_array()
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.image_count)
    images = []
    entries = []
    for i, child in enumerate(seeds):
        rng = np.random.default_rng(child)
        mode = mode_a if rng.random() < cfg.mode_mix else mode_b
        illuminant = _jitter_direction(mode, cfg.mode_spread, rng)
        is_outlier = rng.random() < cfg.outlier_fraction
        tint = np.ones(3)
        if is_outlier:
            tint = rng.uniform(_OUTLIER_TINT_LOW, 1.0, size=3)
            tint /= tint.mean()
        reflectance = 1.0 - rng.random((1, cfg.pixels_per_image, 3))  # uniform (0, 1]
        pixels = reflectance * tint * illuminant * gains
        if cfg.noise_sigma > 0:
            noise = 1.0 + cfg.noise_sigma * rng.standard_normal(pixels.shape)
            pixels = pixels * np.maximum(noise, 0.0)
        images.append(LinearImage.from_pixels(pixels))
        entries.append(ManifestEntry(Path(f"img_{i:05d}.ppm"), illuminant))
    manifest = DatasetManifest(entries=tuple(entries), profile="none")
    return images, manifest, cfg.gains


def _quantize(img: LinearImage) -> np.ndarray:
    peak = img.pixels.max()
    scale = _WRITE_PEAK / peak if peak > 0 else 0.0
    return np.round(img.pixels * scale).astype(np.uint16)


def write_synth_dataset(cfg: SynthConfig, out_dir) -> DatasetManifest:
    """Generate a corpus and write images, manifest, and a sidecar with
    the generator configuration and true gains."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    images, manifest, gains = synth_dataset(cfg)
    for image, entry in zip(images, manifest.entries):
        write_ppm(out / entry.path, _quantize(image))
    save_manifest(manifest, out / "manifest.csv")
    meta = [
        f"image_count {cfg.image_count}",
        f"pixels_per_image {cfg.pixels_per_image}",
        "mode_a " + " ".join(format(v, ".17g") for v in cfg.mode_a),
        "mode_b " + " ".join(format(v, ".17g") for v in cfg.mode_b),
        f"mode_spread {format(cfg.mode_spread, '.17g')}",
        f"mode_mix {format(cfg.mode_mix, '.17g')}",
        "gains " + " ".join(format(v, ".17g") for v in gains),
        f"noise_sigma {format(cfg.noise_sigma, '.17g')}",
        f"outlier_fraction {format(cfg.outlier_fraction, '.17g')}",
        f"seed {cfg.seed}",
    ]
    (out / "synth_meta.txt").write_text("\n".join(meta) + "\n", encoding="utf-8")
    resolved = tuple(replace(e, path=(out / e.path).resolve()) for e in manifest.entries)
    return DatasetManifest(entries=resolved, profile="none")

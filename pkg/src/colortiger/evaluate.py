"""Cross-validated evaluation of the two-center pipeline.

Evaluation works on per-image estimate bundles so a corpus only has to
be decoded once: training needs each image's sweep estimates, and
application needs its gray-world and white-patch estimates.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import LinearImage
from .data import kfold_indices
from .errors import LengthMismatchError
from .estimators import gray_world, white_patch, sog_sweep
from .metrics import ErrorSummary, angular_errors, summarize
from .parallel import ordered_map
from .tiger import DEFAULT_SWEEP_POWER, DEFAULT_TRIM_FRACTION, cluster_estimate_pool, vote


@dataclass(frozen=True)
class ImageEstimates:
    """Everything training and voting need from one image."""

    gw: np.ndarray
    wp: np.ndarray
    sweep: np.ndarray  # (n, 3)


def compute_image_estimates(img: LinearImage, n: int = DEFAULT_SWEEP_POWER) -> ImageEstimates:
    return ImageEstimates(gw=gray_world(img), wp=white_patch(img),
                          sweep=sog_sweep(img, n))


def estimates_for_images(images: Sequence[LinearImage], n: int = DEFAULT_SWEEP_POWER,
                         workers: int = 1) -> list:
    return ordered_map(lambda img: compute_image_estimates(img, n), images, workers)


@dataclass(frozen=True)
class FoldResult:
    fold: int
    centers: np.ndarray        # (2, 3) learned on the other folds
    test_indices: np.ndarray
    chosen: np.ndarray         # (len(test), 3) voted centers per test image
    errors: np.ndarray


@dataclass(frozen=True)
class CrossValResult:
    folds: tuple
    pooled_errors: np.ndarray
    pooled_summary: ErrorSummary
    fold_summaries: tuple

    def per_image_rows(self):
        """(image_index, fold, estimate, error) in evaluation order."""
        for fr in self.folds:
            for idx, est, err in zip(fr.test_indices, fr.chosen, fr.errors):
                yield int(idx), fr.fold, est, float(err)


def vote_centers(centers: np.ndarray, estimates: Sequence[ImageEstimates]) -> np.ndarray:
    """Voted center for each image's estimate bundle."""
    return np.stack([centers[vote(centers, e.gw, e.wp)] for e in estimates])


def cross_validate(estimates: Sequence[ImageEstimates], gts: np.ndarray, k: int,
                   seed: int, t: float = DEFAULT_TRIM_FRACTION,
                   train_limit: Optional[int] = None) -> CrossValResult:
    """k-fold cross-validation of two-center training over one corpus.

    ``train_limit`` caps the number of training images per fold, taken in
    the seeded fold order.
    """
    gts = np.asarray(gts, dtype=np.float64)
    if len(estimates) != gts.shape[0]:
        raise LengthMismatchError(
            f"{len(estimates)} estimate bundles vs {gts.shape[0]} ground truths")
    folds = kfold_indices(len(estimates), k, seed)
    results = []
    for fold_no, test_idx in enumerate(folds):
        train_idx = np.concatenate([fold for j, fold in enumerate(folds) if j != fold_no])
        if train_limit is not None:
            train_idx = train_idx[:train_limit]
        pool = np.vstack([estimates[i].sweep for i in train_idx])
        centers = cluster_estimate_pool(pool, t, seed)
        chosen = vote_centers(centers, [estimates[i] for i in test_idx])
        errors = angular_errors(chosen, gts[test_idx])
        results.append(FoldResult(fold=fold_no, centers=centers, test_indices=test_idx,
                                  chosen=chosen, errors=errors))
    pooled = np.concatenate([fr.errors for fr in results])
    return CrossValResult(
        folds=tuple(results),
        pooled_errors=pooled,
        pooled_summary=summarize(pooled),
        fold_summaries=tuple(summarize(fr.errors) for fr in results),
    )


def baseline_errors(estimates: Sequence[ImageEstimates], gts: np.ndarray) -> dict:
    """Per-image errors of the statistics-only estimators."""
    gw = np.stack([e.gw for e in estimates])
    wp = np.stack([e.wp for e in estimates])
    return {
        "gray_world": angular_errors(gw, np.asarray(gts, dtype=np.float64)),
        "white_patch": angular_errors(wp, np.asarray(gts, dtype=np.float64)),
    }


def train_size_sweep(estimates: Sequence[ImageEstimates], gts: np.ndarray, k: int,
                     seed: int, limits: Sequence[int],
                     t: float = DEFAULT_TRIM_FRACTION) -> list:
    """Cross-validated summaries for a series of training-set caps."""
    rows = []
    for limit in limits:
        result = cross_validate(estimates, gts, k, seed, t=t, train_limit=limit)
        rows.append((int(limit), result.pooled_summary))
    return rows

"""Figure rendering for the report paths.

Every writer saves a PNG next to the delimited file it illustrates. PNG
metadata is pinned so repeated runs produce identical bytes.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .core import rb_chromaticity
from .metrics import Histogram, SaeResult

_PNG_METADATA = {"Software": "colortiger"}
_DPI = 150


def _save(fig, path):
    fig.savefig(path, dpi=_DPI, metadata=_PNG_METADATA)
    plt.close(fig)


def save_histogram_png(path, hist: Histogram, title: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    widths = np.diff(hist.edges)
    ax.bar(hist.edges[:-1], hist.percents, width=widths, align="edge",
           color="#4878d0", edgecolor="white", linewidth=0.3)
    ax.set_xlabel("angle to closest element (degrees)")
    ax.set_ylabel("percent of set")
    ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)


def save_curve_png(path, rows, title: str) -> None:
    """Median angular error against the training-set cap."""
    limits = [limit for limit, _ in rows]
    medians = [summary.median for _, summary in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(limits, medians, marker="o", color="#d65f5f")
    ax.set_xlabel("training images per fold")
    ax.set_ylabel("median angular error (degrees)")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def save_summary_png(path, rows, title: str) -> None:
    """Grouped bars of the summary statistics per method."""
    stats = ("mean", "median", "trimean", "best25", "worst25", "avg")
    names = [name for name, _ in rows]
    fig, ax = plt.subplots(figsize=(7, 4))
    x = np.arange(len(stats))
    width = 0.8 / max(1, len(rows))
    for i, (name, summary) in enumerate(rows):
        ax.bar(x + i * width, summary.as_row(), width=width, label=name)
    ax.set_xticks(x + 0.4 - width / 2)
    ax.set_xticklabels(stats)
    ax.set_ylabel("degrees")
    ax.set_title(title)
    if names:
        ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def save_assignment_png(path, gts, ests, sae: SaeResult, title: str) -> None:
    """Ground truths and estimates on the rb plane with matched pairs joined."""
    gt_rb = np.array([rb_chromaticity(v) for v in gts])
    est_rb = np.array([rb_chromaticity(v) for v in ests])
    fig, ax = plt.subplots(figsize=(5, 5))
    for i, j in enumerate(sae.assignment):
        ax.plot([gt_rb[i, 0], est_rb[j, 0]], [gt_rb[i, 1], est_rb[j, 1]],
                color="gray", linewidth=0.5, zorder=1)
    ax.scatter(gt_rb[:, 0], gt_rb[:, 1], s=12, color="#4878d0", label="ground truth", zorder=2)
    ax.scatter(est_rb[:, 0], est_rb[:, 1], s=12, color="#d65f5f", label="estimate", zorder=2)
    ax.set_xlabel("r chromaticity")
    ax.set_ylabel("b chromaticity")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)

"""Delimited report writers.

Machine files carry full precision (17 significant digits) so identical
runs produce byte-identical output; the human tables printed by the CLI
round to four decimals instead.
"""

import csv
from pathlib import Path

from .metrics import ErrorSummary, Histogram, SaeResult

SUMMARY_HEADER = ("method", "mean", "median", "trimean", "best25", "worst25", "avg")


def full(x) -> str:
    return format(float(x), ".17g")


def _open_writer(path):
    f = Path(path).open("w", encoding="utf-8", newline="")
    return f, csv.writer(f, lineterminator="\n")


def write_summary_csv(path, rows) -> None:
    """``rows`` is a sequence of (method_name, ErrorSummary)."""
    f, writer = _open_writer(path)
    with f:
        writer.writerow(SUMMARY_HEADER)
        for name, summary in rows:
            writer.writerow([name] + [full(v) for v in summary.as_row()])


def write_histogram_csv(path, hist: Histogram) -> None:
    f, writer = _open_writer(path)
    with f:
        writer.writerow(("bin_start", "bin_end", "percent"))
        for start, end, pct in hist.rows():
            writer.writerow((full(start), full(end), full(pct)))


def write_assignment_csv(path, sae: SaeResult) -> None:
    f, writer = _open_writer(path)
    with f:
        writer.writerow(("gt_index", "est_index", "angle_deg"))
        for i, j in enumerate(sae.assignment):
            writer.writerow((i, int(j), full(sae.cost[i, j])))


def write_estimates_csv(path, rows) -> None:
    """``rows`` is a sequence of (name, method, estimate, error_or_None)."""
    f, writer = _open_writer(path)
    with f:
        writer.writerow(("path", "method", "r", "g", "b", "angular_error_deg"))
        for name, method, est, err in rows:
            writer.writerow([name, method] + [full(v) for v in est]
                            + ([full(err)] if err is not None else [""]))


def write_curve_csv(path, rows) -> None:
    """``rows`` is a sequence of (train_limit, ErrorSummary)."""
    f, writer = _open_writer(path)
    with f:
        writer.writerow(("train_limit",) + SUMMARY_HEADER[1:])
        for limit, summary in rows:
            writer.writerow([limit] + [full(v) for v in summary.as_row()])


def summary_table_text(rows) -> str:
    """Fixed four-decimal text table for standard output."""
    lines = ["{:<24} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}".format(*SUMMARY_HEADER)]
    for name, summary in rows:
        lines.append("{:<24} {:>9.4f} {:>9.4f} {:>9.4f} {:>9.4f} {:>9.4f} {:>9.4f}".format(
            name, *summary.as_row()))
    return "\n".join(lines)


def summary_to_dict(summary: ErrorSummary) -> dict:
    return {
        "mean": summary.mean, "median": summary.median, "trimean": summary.trimean,
        "best25": summary.best25, "worst25": summary.worst25, "avg": summary.avg,
    }

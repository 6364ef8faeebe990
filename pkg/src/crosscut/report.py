"""Delimited report writers and plain-text tables.

All CSVs use \n line endings and fixed decimal formatting so repeated runs
are byte-identical. Fractions print with 2 decimals (agreement tables with
3), percentages with 2.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .agreement import AgreementTable
from .classes import SHORT_CODES, DefectClass
from .manifest import SubsetStats, stats_class_order
from .metrics import HistogramReport, MetricReport

CLASS_COLUMNS = [
    ("All", None),
    ("BG", int(DefectClass.BACKGROUND)),
    ("CC", int(DefectClass.CROSSCUT)),
    ("R", int(DefectClass.ROT)),
    ("R(m)", int(DefectClass.ROT_MAYBE)),
    ("PW", int(DefectClass.PRESSURE_WOOD)),
    ("DC", int(DefectClass.DISCOLORATION)),
    ("IC", int(DefectClass.INGROWTH_CRACK)),
]


def _fmt(value, decimals: int) -> str:
    if value is None:
        return ""
    return f"{value:.{decimals}f}"


def _open_writer(path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    handle = path.open("w", encoding="utf-8", newline="")
    return handle, csv.writer(handle, lineterminator="\n")


def metric_rows(report: MetricReport, decimals: int = 2) -> list[list[str]]:
    """Metric x class grid plus the ModelScore row, mirroring the evaluation tables."""
    per_class = {
        "f1": report.f1, "iou": report.iou, "kappa": report.kappa,
        "precision": report.precision, "recall": report.recall,
        "accuracy": report.accuracy, "pixel_diff": report.pixel_diff,
    }
    all_values = {
        "f1": report.f1_all, "iou": report.iou_all, "kappa": report.kappa_all_multiclass,
        "precision": report.precision_all, "recall": report.recall_all,
        "accuracy": report.accuracy_all_multiclass, "pixel_diff": report.pixel_diff_all,
    }
    rows = []
    for metric in ("f1", "iou", "kappa", "precision", "recall", "accuracy", "pixel_diff"):
        row = [metric]
        for code, cls in CLASS_COLUMNS:
            if cls is None:
                row.append(_fmt(all_values[metric], decimals))
            else:
                table = per_class[metric]
                row.append(_fmt(table[cls] if table is not None else None, decimals))
        rows.append(row)
    # mean-of-classes variants of the multiclass All values, clearly named
    rows.append(["kappa_mean", _fmt(report.kappa_all_mean, decimals)] + [""] * 7)
    rows.append(["accuracy_mean", _fmt(report.accuracy_all_mean, decimals)] + [""] * 7)
    rows.append(["model_score", _fmt(report.model_score, decimals)] + [""] * 7)
    return rows


def write_metric_report_csv(report: MetricReport, path: str | Path) -> None:
    handle, writer = _open_writer(Path(path))
    with handle:
        writer.writerow(["metric"] + [code for code, _ in CLASS_COLUMNS])
        writer.writerows(metric_rows(report))


def write_per_sample_csv(sample_ids: list[str], reports: list[MetricReport],
                         path: str | Path) -> None:
    """One row per sample per metric; empty cells for undefined PixelDiff."""
    handle, writer = _open_writer(Path(path))
    with handle:
        writer.writerow(["sample_id", "metric"] + [code for code, _ in CLASS_COLUMNS])
        for sid, report in zip(sample_ids, reports):
            for row in metric_rows(report):
                writer.writerow([sid] + row)


def write_confusion_csvs(cm: np.ndarray, raw_path: str | Path, norm_path: str | Path) -> None:
    codes = [SHORT_CODES[c] for c in DefectClass]
    handle, writer = _open_writer(Path(raw_path))
    with handle:
        writer.writerow(["gt\\pred"] + codes)
        for i, code in enumerate(codes):
            writer.writerow([code] + [str(int(v)) for v in cm[i]])
    sums = cm.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        norm = np.where(sums > 0, 100.0 * cm / sums, 0.0)
    handle, writer = _open_writer(Path(norm_path))
    with handle:
        writer.writerow(["gt\\pred"] + codes)
        for i, code in enumerate(codes):
            writer.writerow([code] + [f"{v:.2f}" for v in norm[i]])


def write_histograms_csv(histograms: list[HistogramReport], path: str | Path) -> None:
    handle, writer = _open_writer(Path(path))
    with handle:
        writer.writerow(["metric", "class", "bin_lo", "bin_hi", "count"])
        for h in histograms:
            for i, count in enumerate(h.counts):
                writer.writerow([h.metric, h.class_code,
                                 f"{h.edges[i]:.4f}", f"{h.edges[i + 1]:.4f}", str(count)])


def write_stats_csv(stats: list[SubsetStats], path: str | Path) -> None:
    handle, writer = _open_writer(Path(path))
    with handle:
        writer.writerow(["subset", "n_images"] + [code for _, code in stats_class_order()])
        for row in stats:
            writer.writerow([row.subset, str(row.n_images)]
                            + [f"{row.mean_share[cls]:.2f}" for cls, _ in stats_class_order()])


def write_agreement_csv(table: AgreementTable, path: str | Path, decimals: int = 3) -> None:
    """Two stacked blocks (kappa, iou), columns All/BG/CC/R/R(m)/PW/DC/IC."""
    handle, writer = _open_writer(Path(path))
    with handle:
        writer.writerow(["block", "baseline", "annotator", "n_samples"]
                        + [code for code, _ in CLASS_COLUMNS])
        for block in ("kappa", "iou"):
            for row in table.rows:
                values = row.kappa if block == "kappa" else row.iou
                all_value = row.kappa_all if block == "kappa" else row.iou_all
                cells = [_fmt(all_value, decimals)]
                cells += [_fmt(values[cls], decimals) for _, cls in CLASS_COLUMNS[1:]]
                writer.writerow([block, table.baseline, row.annotator, str(row.n_samples)] + cells)


def write_split_csv(assignment: dict[str, str], path: str | Path) -> None:
    handle, writer = _open_writer(Path(path))
    with handle:
        writer.writerow(["sample_id", "bucket"])
        for sid in sorted(assignment):
            writer.writerow([sid, assignment[sid]])


def text_table(header: list[str], rows: list[list[str]]) -> str:
    """Fixed-width table for stdout."""
    widths = [len(h) for h in header]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines)

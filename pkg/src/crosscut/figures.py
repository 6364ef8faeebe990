"""Figure rendering for the report paths (headless matplotlib)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .classes import SHORT_CODES, DefectClass
from .manifest import SubsetStats, stats_class_order
from .metrics import HistogramReport, normalize_rows

_CODES = [SHORT_CODES[c] for c in DefectClass]


def save_confusion_figure(cm: np.ndarray, path: str | Path, title: str = "Micro-average confusion matrix") -> None:
    norm = normalize_rows(cm)
    fig, ax = plt.subplots(figsize=(7, 6))
    im = ax.imshow(norm, cmap="Blues", vmin=0.0, vmax=100.0)
    ax.set_xticks(range(len(_CODES)), _CODES)
    ax.set_yticks(range(len(_CODES)), _CODES)
    ax.set_xlabel("prediction")
    ax.set_ylabel("ground truth")
    ax.set_title(title)
    for i in range(len(_CODES)):
        for j in range(len(_CODES)):
            color = "white" if norm[i, j] > 50 else "black"
            ax.text(j, i, f"{norm[i, j]:.1f}", ha="center", va="center",
                    color=color, fontsize=8)
    fig.colorbar(im, ax=ax, label="% of ground-truth row")
    fig.tight_layout()
    _save(fig, path)


def save_histogram_grid(histograms: list[HistogramReport], metric: str, path: str | Path) -> None:
    """One panel per class column for a single metric (sample distribution)."""
    hists = [h for h in histograms if h.metric == metric]
    if not hists:
        return
    cols = 4
    rows = (len(hists) + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(3.2 * cols, 2.6 * rows), squeeze=False)
    for ax in axes.flat:
        ax.set_visible(False)
    for ax, h in zip(axes.flat, hists):
        ax.set_visible(True)
        widths = [h.edges[i + 1] - h.edges[i] for i in range(len(h.counts))]
        ax.bar(h.edges[:-1], h.counts, width=widths, align="edge",
               color="#4878a8", edgecolor="white")
        ax.set_title(f"{metric} [{h.class_code}]", fontsize=10)
        ax.set_xlim(h.edges[0], h.edges[-1])
    fig.suptitle(f"Sample distribution: {metric}")
    fig.tight_layout()
    _save(fig, path)


def save_stats_figure(stats: list[SubsetStats], path: str | Path) -> None:
    """Grouped bars of mean class share per subset."""
    order = stats_class_order()
    fig, ax = plt.subplots(figsize=(8, 4.5))
    width = 0.8 / max(len(stats), 1)
    x = np.arange(len(order))
    for i, row in enumerate(stats):
        shares = [row.mean_share[cls] for cls, _ in order]
        ax.bar(x + i * width, shares, width=width, label=f"{row.subset} (n={row.n_images})")
    ax.set_xticks(x + 0.4 - width / 2, [code for _, code in order])
    ax.set_ylabel("mean % of crosscut area")
    ax.set_title("Class share by subset")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def save_agreement_figure(table, path: str | Path) -> None:
    """Per-class kappa bars, one group per compared annotator."""
    if not table.rows:
        return
    order = [("All", None)] + [(SHORT_CODES[c], int(c)) for c in DefectClass]
    fig, ax = plt.subplots(figsize=(9, 4.5))
    x = np.arange(len(order))
    width = 0.8 / len(table.rows)
    for i, row in enumerate(table.rows):
        values = [row.kappa_all if cls is None else row.kappa[cls] for _, cls in order]
        ax.bar(x + i * width, values, width=width, label=row.annotator)
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xticks(x + 0.4 - width / 2, [code for code, _ in order])
    ax.set_ylabel("Cohen's kappa")
    ax.set_title(f"Agreement vs baseline {table.baseline}")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def _save(fig, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150)
    plt.close(fig)

"""Evaluation metrics over (ground truth, prediction) label-mask pairs.

Every value is derived from the 7x7 pixel confusion matrix and computed as a
single integer ratio, so results are exact (correctly rounded) floats.

Edge-case policy for class-wise metrics: a class absent from both masks
scores the best possible value, a class absent from exactly one mask the
worst. PixelDiff is the exception: absent-from-one keeps its raw formula
value, which stays well defined, and absent-from-both is 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classes import NUM_CLASSES, SHORT_CODES, DefectClass
from .errors import ValidationFailure
from .mask_ops import validate_mask

EDGE_NORMAL = "normal"
EDGE_BOTH_ABSENT = "both-absent"
EDGE_ONE_ABSENT = "one-absent"

CLASS_METRICS = ("f1", "iou", "kappa", "precision", "recall", "accuracy", "pixel_diff")


_LOWER_IS_BETTER = {"pixel_diff"}


@dataclass(frozen=True)
class EdgeCasePolicy:
    """Best and worst substitute values per metric."""

    best: dict = field(default_factory=lambda: {
        "f1": 1.0, "iou": 1.0, "precision": 1.0, "recall": 1.0,
        "accuracy": 1.0, "kappa": 1.0, "pixel_diff": 0.0,
    })
    worst: dict = field(default_factory=lambda: {
        "f1": 0.0, "iou": 0.0, "precision": 0.0, "recall": 0.0,
        "accuracy": 0.0, "kappa": -1.0, "pixel_diff": 1.0,
    })

    def __post_init__(self):
        for name in CLASS_METRICS:
            best, worst = self.best[name], self.worst[name]
            ok = best < worst if name in _LOWER_IS_BETTER else best > worst
            if not ok:
                raise ValidationFailure(
                    f"edge-case policy for {name}: best ({best}) must beat worst ({worst})"
                )


DEFAULT_POLICY = EdgeCasePolicy()


def confusion(gt: np.ndarray, pred: np.ndarray) -> np.ndarray:
    """7x7 pixel-count matrix; entry (i, j) counts gt class i predicted as j."""
    gt, pred = validate_mask(gt), validate_mask(pred)
    if gt.shape != pred.shape:
        raise ValidationFailure(f"mask shapes differ: {gt.shape} vs {pred.shape}")
    idx = gt.reshape(-1).astype(np.int64) * NUM_CLASSES + pred.reshape(-1)
    counts = np.bincount(idx, minlength=NUM_CLASSES * NUM_CLASSES)
    return counts.reshape(NUM_CLASSES, NUM_CLASSES)


def class_counts(cm: np.ndarray, cls: int) -> tuple[int, int, int, int]:
    """One-vs-rest (tp, fp, fn, tn) for a class."""
    tp = int(cm[cls, cls])
    fn = int(cm[cls].sum()) - tp
    fp = int(cm[:, cls].sum()) - tp
    tn = int(cm.sum()) - tp - fn - fp
    return tp, fp, fn, tn


def edge_state(cm: np.ndarray, cls: int) -> str:
    """Absence state of a class: in neither mask, in exactly one, or in both."""
    in_gt = int(cm[cls].sum()) > 0
    in_pred = int(cm[:, cls].sum()) > 0
    if not in_gt and not in_pred:
        return EDGE_BOTH_ABSENT
    if in_gt != in_pred:
        return EDGE_ONE_ABSENT
    return EDGE_NORMAL


def binary_kappa(tp: int, fp: int, fn: int, tn: int) -> float:
    """Cohen's kappa on the one-vs-rest reduction, as one exact integer ratio."""
    n = tp + fp + fn + tn
    pe_num = (tp + fn) * (tp + fp) + (fp + tn) * (fn + tn)
    den = n * n - pe_num
    if den == 0:
        # chance agreement 1 means both raters are constant on the same side,
        # which is only reachable with observed agreement 1
        return 1.0
    return (n * (tp + tn) - pe_num) / den


def multiclass_kappa(cm: np.ndarray) -> float:
    """Cohen's kappa over the full label map."""
    n = int(cm.sum())
    if n == 0:
        raise ValidationFailure("empty confusion matrix")
    trace = int(np.trace(cm))
    pe_num = sum(int(cm[k].sum()) * int(cm[:, k].sum()) for k in range(cm.shape[0]))
    den = n * n - pe_num
    if den == 0:
        return 1.0
    return (n * trace - pe_num) / den


def pixel_diff_denominator(cm: np.ndarray) -> int:
    """Total non-background ground-truth pixels (class index 0 excluded)."""
    return int(cm[1:].sum())


def pixel_diff(cm: np.ndarray, cls: int | None = None) -> float:
    """Misclassified fraction of the crosscut.

    cls None gives the overall value: false positives plus false negatives
    summed over the non-background classes, divided by the non-background
    ground-truth pixel count. A class id gives that class's share over the
    same denominator (Background allowed as a target class).
    """
    den = pixel_diff_denominator(cm)
    if den == 0:
        raise ValidationFailure("PixelDiff undefined: ground truth is entirely Background")
    if cls is None:
        num = 0
        for k in range(1, NUM_CLASSES):
            tp, fp, fn, _ = class_counts(cm, k)
            num += fp + fn
    else:
        _, fp, fn, _ = class_counts(cm, int(cls))
        num = fp + fn
    return num / den


def class_metrics(cm: np.ndarray, cls: int,
                  policy: EdgeCasePolicy = DEFAULT_POLICY) -> dict[str, float]:
    """Per-class precision, recall, f1, iou, accuracy, kappa and pixel_diff.

    pixel_diff is omitted from the result when its denominator is zero.
    """
    cls = int(cls)
    state = edge_state(cm, cls)
    out: dict[str, float] = {}
    if state == EDGE_BOTH_ABSENT:
        out = dict(policy.best)
    elif state == EDGE_ONE_ABSENT:
        out = dict(policy.worst)
        if pixel_diff_denominator(cm) > 0:
            out["pixel_diff"] = pixel_diff(cm, cls)  # raw formula stays well defined
        else:
            out.pop("pixel_diff")
    else:
        tp, fp, fn, tn = class_counts(cm, cls)
        n = tp + fp + fn + tn
        out["precision"] = tp / (tp + fp)
        out["recall"] = tp / (tp + fn)
        out["f1"] = 2 * tp / (2 * tp + fp + fn)
        out["iou"] = tp / (tp + fp + fn)
        out["accuracy"] = (tp + tn) / n
        out["kappa"] = binary_kappa(tp, fp, fn, tn)
        if pixel_diff_denominator(cm) > 0:
            out["pixel_diff"] = pixel_diff(cm, cls)
    if state == EDGE_BOTH_ABSENT and pixel_diff_denominator(cm) == 0:
        out.pop("pixel_diff")
    return out


def model_score(f1_all: float, f1_rot: float, f1_ic: float) -> float:
    """Weighted F1 composite in percent, doubling the Rot term."""
    for v in (f1_all, f1_rot, f1_ic):
        if not 0.0 <= v <= 1.0:
            raise ValidationFailure(f"F1 inputs must be in [0, 1], got {v}")
    return 100.0 * (f1_all + 2.0 * f1_rot + f1_ic) / 4.0


@dataclass
class MetricReport:
    """Per-class and aggregate metric values for one mask pair or a whole set.

    Keys of the per-class dicts are class ids 0..6. The `All` aggregate of
    f1/iou/precision/recall is the unweighted mean of the 7 class values
    (after edge-case substitution); kappa and accuracy additionally carry a
    multiclass variant computed over the full label map, which is the one
    shown in the main report column. pixel_diff_all uses its own formula and
    is None when the ground truth had no non-background pixels.
    """

    f1: dict[int, float]
    iou: dict[int, float]
    precision: dict[int, float]
    recall: dict[int, float]
    accuracy: dict[int, float]
    kappa: dict[int, float]
    pixel_diff: dict[int, float] | None
    f1_all: float = 0.0
    iou_all: float = 0.0
    precision_all: float = 0.0
    recall_all: float = 0.0
    kappa_all_multiclass: float = 0.0
    kappa_all_mean: float = 0.0
    accuracy_all_multiclass: float = 0.0
    accuracy_all_mean: float = 0.0
    pixel_diff_all: float | None = None
    model_score: float = 0.0
    edge_flags: dict[int, str] = field(default_factory=dict)
    n_samples: int = 1

    def finalize_means(self) -> None:
        ids = list(range(NUM_CLASSES))
        self.f1_all = sum(self.f1[c] for c in ids) / NUM_CLASSES
        self.iou_all = sum(self.iou[c] for c in ids) / NUM_CLASSES
        self.precision_all = sum(self.precision[c] for c in ids) / NUM_CLASSES
        self.recall_all = sum(self.recall[c] for c in ids) / NUM_CLASSES
        self.kappa_all_mean = sum(self.kappa[c] for c in ids) / NUM_CLASSES
        self.accuracy_all_mean = sum(self.accuracy[c] for c in ids) / NUM_CLASSES
        self.model_score = model_score(
            self.f1_all, self.f1[int(DefectClass.ROT)], self.f1[int(DefectClass.INGROWTH_CRACK)]
        )


def evaluate_pair(gt: np.ndarray, pred: np.ndarray,
                  policy: EdgeCasePolicy = DEFAULT_POLICY) -> tuple[MetricReport, np.ndarray]:
    """Full metric report plus the confusion matrix for one mask pair."""
    cm = confusion(gt, pred)
    return evaluate_confusion(cm, policy), cm


def evaluate_confusion(cm: np.ndarray, policy: EdgeCasePolicy = DEFAULT_POLICY) -> MetricReport:
    per = {name: {} for name in ("f1", "iou", "precision", "recall", "accuracy", "kappa")}
    pdiff: dict[int, float] = {}
    flags: dict[int, str] = {}
    pdiff_defined = pixel_diff_denominator(cm) > 0
    for cls in range(NUM_CLASSES):
        values = class_metrics(cm, cls, policy)
        flags[cls] = edge_state(cm, cls)
        for name in per:
            per[name][cls] = values[name]
        if pdiff_defined:
            pdiff[cls] = values["pixel_diff"]
    n = int(cm.sum())
    report = MetricReport(
        f1=per["f1"], iou=per["iou"], precision=per["precision"], recall=per["recall"],
        accuracy=per["accuracy"], kappa=per["kappa"],
        pixel_diff=pdiff if pdiff_defined else None,
        kappa_all_multiclass=multiclass_kappa(cm),
        accuracy_all_multiclass=int(np.trace(cm)) / n,
        pixel_diff_all=pixel_diff(cm) if pdiff_defined else None,
        edge_flags=flags,
    )
    report.finalize_means()
    return report


def aggregate(reports: list[MetricReport], cms: list[np.ndarray]) -> tuple[MetricReport, np.ndarray]:
    """Set-level macro report (unweighted per-class means over samples) plus
    the micro-average confusion matrix (element-wise sum).

    Samples with undefined PixelDiff are excluded from the PixelDiff means
    only; every other metric averages over all samples.
    """
    if not reports or not cms:
        raise ValidationFailure("cannot aggregate an empty report list")
    if len(reports) != len(cms):
        raise ValidationFailure("reports and confusion matrices must align")
    ids = list(range(NUM_CLASSES))

    def mean_per_class(extract) -> dict[int, float]:
        return {c: sum(extract(r)[c] for r in reports) / len(reports) for c in ids}

    pd_reports = [r for r in reports if r.pixel_diff is not None]
    agg = MetricReport(
        f1=mean_per_class(lambda r: r.f1),
        iou=mean_per_class(lambda r: r.iou),
        precision=mean_per_class(lambda r: r.precision),
        recall=mean_per_class(lambda r: r.recall),
        accuracy=mean_per_class(lambda r: r.accuracy),
        kappa=mean_per_class(lambda r: r.kappa),
        pixel_diff={c: sum(r.pixel_diff[c] for r in pd_reports) / len(pd_reports) for c in ids}
        if pd_reports else None,
        kappa_all_multiclass=sum(r.kappa_all_multiclass for r in reports) / len(reports),
        accuracy_all_multiclass=sum(r.accuracy_all_multiclass for r in reports) / len(reports),
        pixel_diff_all=sum(r.pixel_diff_all for r in pd_reports) / len(pd_reports)
        if pd_reports else None,
        n_samples=len(reports),
    )
    agg.finalize_means()
    micro = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.int64)
    for cm in cms:
        micro += cm
    return agg, micro


def normalize_rows(cm: np.ndarray) -> np.ndarray:
    """Row-normalized confusion matrix in percent; all-zero rows stay zero."""
    cm = np.asarray(cm, dtype=np.float64)
    sums = cm.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(sums > 0, 100.0 * cm / sums, 0.0)
    return out


METRIC_RANGES = {
    "f1": (0.0, 1.0), "iou": (0.0, 1.0), "precision": (0.0, 1.0), "recall": (0.0, 1.0),
    "accuracy": (0.0, 1.0), "kappa": (-1.0, 1.0), "pixel_diff": (0.0, 1.0),
}


@dataclass
class HistogramReport:
    metric: str
    class_code: str
    edges: list[float]
    counts: list[int]


def histogram(values: list[float], metric: str, class_code: str, bins: int = 10) -> HistogramReport:
    """Equal-width binning over the metric's range.

    Values beyond the range (PixelDiff can exceed 1) are counted in the
    nearest extreme bin, so edge-case samples always land at the ends.
    """
    if bins < 1:
        raise ValidationFailure("bins must be >= 1")
    if metric not in METRIC_RANGES:
        raise ValidationFailure(f"unknown metric {metric!r}")
    lo, hi = METRIC_RANGES[metric]
    width = (hi - lo) / bins
    counts = [0] * bins
    for v in values:
        idx = int((v - lo) / width)
        counts[min(max(idx, 0), bins - 1)] += 1
    edges = [lo + i * width for i in range(bins + 1)]
    return HistogramReport(metric=metric, class_code=class_code, edges=edges, counts=counts)


def class_code(cls: int) -> str:
    return SHORT_CODES[DefectClass(cls)]


def histogram_from_reports(reports: list[MetricReport], metric: str, cls: int | str,
                           bins: int = 10) -> HistogramReport:
    """Bin one metric/class column over per-sample reports.

    cls is a class id or "All"; samples with the value undefined (PixelDiff
    without non-background ground truth) are skipped.
    """
    values: list[float] = []
    for r in reports:
        if cls == "All":
            v = {
                "f1": r.f1_all, "iou": r.iou_all, "precision": r.precision_all,
                "recall": r.recall_all, "kappa": r.kappa_all_multiclass,
                "accuracy": r.accuracy_all_multiclass, "pixel_diff": r.pixel_diff_all,
            }[metric]
        else:
            table = getattr(r, metric)
            v = table[int(cls)] if table is not None else None
        if v is not None:
            values.append(v)
    code = "All" if cls == "All" else class_code(int(cls))
    return histogram(values, metric, code, bins)

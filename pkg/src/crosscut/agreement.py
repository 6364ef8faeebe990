"""Pairwise inter-annotator agreement: per-class Cohen's kappa and Jaccard/IoU.

One baseline annotator is compared against every other annotator (a model's
imported predictions can join as an extra annotator). Values are per-sample
one-vs-rest kappa and IoU with the standard edge-case policy, averaged over
the samples; the All column holds the multiclass kappa and the mean of the
7 per-class IoU values, each averaged over samples.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .classes import NUM_CLASSES
from .errors import ValidationFailure
from .metrics import DEFAULT_POLICY, EdgeCasePolicy, class_metrics, confusion, multiclass_kappa

log = logging.getLogger(__name__)


@dataclass
class AgreementRow:
    annotator: str
    kappa: dict[int, float]  # class id -> mean kappa
    iou: dict[int, float]
    kappa_all: float  # mean multiclass kappa
    iou_all: float  # mean of per-class IoU means' sample-wise aggregate
    n_samples: int


@dataclass
class AgreementTable:
    baseline: str
    subset: str
    rows: list[AgreementRow] = field(default_factory=list)
    skipped: dict[str, list[str]] = field(default_factory=dict)  # annotator -> missing samples


def pairwise_agreement(baseline_masks: list[np.ndarray], other_masks: list[np.ndarray],
                       policy: EdgeCasePolicy = DEFAULT_POLICY) -> AgreementRow:
    """Mean per-class kappa/IoU over aligned mask pairs."""
    if len(baseline_masks) != len(other_masks) or not baseline_masks:
        raise ValidationFailure("agreement needs equal non-empty mask lists")
    kappa_sum = {c: 0.0 for c in range(NUM_CLASSES)}
    iou_sum = {c: 0.0 for c in range(NUM_CLASSES)}
    kappa_all_sum = 0.0
    iou_all_sum = 0.0
    for a, b in zip(baseline_masks, other_masks):
        cm = confusion(a, b)
        ious = []
        for cls in range(NUM_CLASSES):
            values = class_metrics(cm, cls, policy)
            kappa_sum[cls] += values["kappa"]
            iou_sum[cls] += values["iou"]
            ious.append(values["iou"])
        kappa_all_sum += multiclass_kappa(cm)
        iou_all_sum += sum(ious) / NUM_CLASSES
    n = len(baseline_masks)
    return AgreementRow(
        annotator="",
        kappa={c: kappa_sum[c] / n for c in kappa_sum},
        iou={c: iou_sum[c] / n for c in iou_sum},
        kappa_all=kappa_all_sum / n,
        iou_all=iou_all_sum / n,
        n_samples=n,
    )


def build_agreement_table(baseline: str, subset: str,
                          masks_by_annotator: dict[str, dict[str, np.ndarray]],
                          policy: EdgeCasePolicy = DEFAULT_POLICY) -> AgreementTable:
    """Agreement table of every annotator against the baseline.

    masks_by_annotator maps annotator -> {sample_id -> mask}. Samples missing
    for either side of a pair are excluded and reported; annotators without
    any shared sample are omitted with a diagnostic.
    """
    if baseline not in masks_by_annotator:
        raise ValidationFailure(f"baseline annotator {baseline!r} has no masks")
    base = masks_by_annotator[baseline]
    table = AgreementTable(baseline=baseline, subset=subset)
    for annotator in masks_by_annotator:
        if annotator == baseline:
            continue
        theirs = masks_by_annotator[annotator]
        shared = sorted(set(base) & set(theirs))
        missing = sorted((set(base) | set(theirs)) - set(shared))
        if missing:
            log.warning("agreement %s vs %s: %d sample(s) present on one side only: %s",
                        baseline, annotator, len(missing), ", ".join(missing))
            table.skipped[annotator] = missing
        if not shared:
            log.warning("agreement row for %s omitted: no shared samples with %s",
                        annotator, baseline)
            continue
        row = pairwise_agreement([base[s] for s in shared], [theirs[s] for s in shared], policy)
        row.annotator = annotator
        table.rows.append(row)
    return table

"""Label-mask operations: hierarchical flattening, crosscut clipping, casting, diffs.

A label mask is a (height, width) uint8 array of class ids; Background is 0.
"""

from __future__ import annotations

import logging

import numpy as np

from .classes import DefectClass, NUM_CLASSES, precedence_scores
from .errors import ValidationFailure
from .regions import RegionAnnotation, rasterize_region
from .rle import rle_encode

log = logging.getLogger(__name__)

DEFECT_IDS = tuple(range(2, 7))  # every class that must stay inside the crosscut


def validate_mask(mask: np.ndarray) -> np.ndarray:
    mask = np.asarray(mask)
    if mask.ndim != 2:
        raise ValidationFailure(f"label mask must be 2D, got shape {mask.shape}")
    if mask.size and int(mask.max()) >= NUM_CLASSES:
        raise ValidationFailure(f"label mask holds invalid class id {int(mask.max())}")
    return mask.astype(np.uint8, copy=False)


def flatten(regions: list[RegionAnnotation], hierarchy: tuple[DefectClass, ...],
            width: int, height: int) -> np.ndarray:
    """Resolve overlapping regions to one class per pixel.

    Regions are painted from lowest to highest precedence so the
    highest-priority class wins every overlap; uncovered pixels stay
    Background. The input order of the region list is irrelevant.
    """
    scores = precedence_scores(hierarchy)
    mask = np.zeros((height, width), dtype=np.uint8)
    for region in sorted(regions, key=lambda r: scores[int(r.class_id)]):
        mask[rasterize_region(region, width, height)] = int(region.class_id)
    return mask


def crosscut_support(regions: list[RegionAnnotation], width: int, height: int) -> np.ndarray | None:
    """Union of all rasterized Crosscut regions, or None when the sample has none.

    Computed before flattening because flattening overwrites crosscut pixels
    with defect labels.
    """
    support = None
    for region in regions:
        if region.class_id != DefectClass.CROSSCUT:
            continue
        r = rasterize_region(region, width, height)
        support = r if support is None else (support | r)
    return support


def clip_to_crosscut(mask: np.ndarray, support: np.ndarray | None, *,
                     sample_id: str = "") -> np.ndarray:
    """Turn defect pixels outside the crosscut support into Background.

    A sample without crosscut support is left unchanged with a warning:
    there is nothing to clip against.
    """
    mask = validate_mask(mask)
    if support is None or not support.any():
        log.warning("sample %s has no crosscut region; clipping skipped", sample_id or "<unknown>")
        return mask.copy()
    if support.shape != mask.shape:
        raise ValidationFailure(
            f"crosscut support shape {support.shape} != mask shape {mask.shape}"
        )
    out = mask.copy()
    outside_defect = ~support & (mask >= 2)
    out[outside_defect] = int(DefectClass.BACKGROUND)
    return out


def cast_rot_maybe(mask: np.ndarray, target: DefectClass) -> np.ndarray:
    """Attribute every Rot(maybe) pixel to the target class (Rot or Crosscut)."""
    if target not in (DefectClass.ROT, DefectClass.CROSSCUT):
        raise ValidationFailure(
            f"Rot(maybe) can only be cast to Rot or Crosscut, got {DefectClass(target).name}"
        )
    mask = validate_mask(mask)
    out = mask.copy()
    out[mask == int(DefectClass.ROT_MAYBE)] = int(target)
    return out


def diff_overlay(gt: np.ndarray, pred: np.ndarray) -> np.ndarray:
    """Binary disagreement mask: set exactly where the two masks differ."""
    gt, pred = validate_mask(gt), validate_mask(pred)
    if gt.shape != pred.shape:
        raise ValidationFailure(f"mask shapes differ: {gt.shape} vs {pred.shape}")
    return gt != pred


def regions_from_mask(mask: np.ndarray, annotator: str = "", source: str = "human") -> list[RegionAnnotation]:
    """One RLE region per non-background class present in the mask."""
    mask = validate_mask(mask)
    regions = []
    for cls in sorted(np.unique(mask).tolist()):
        if cls == int(DefectClass.BACKGROUND):
            continue
        regions.append(RegionAnnotation(
            class_id=DefectClass(cls),
            rle=rle_encode((mask == cls).astype(np.uint8)),
            annotator=annotator,
            source=source,
            name=f"class-{cls}",
        ))
    return regions

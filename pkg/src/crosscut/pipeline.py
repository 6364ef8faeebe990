"""Mask-building pipeline: regions -> rasterize -> flatten -> clip -> cleanup."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .classes import DefectClass
from .errors import ValidationFailure
from .manifest import DatasetManifest, SampleRecord
from .mask_ops import clip_to_crosscut, crosscut_support, flatten
from .maskio import write_mask_png
from .morphology import MorphologyParams, remove_small_artifacts
from .regions import RegionAnnotation, validate_polygon_bounds

log = logging.getLogger(__name__)


@dataclass
class CleanMaskResult:
    mask: np.ndarray
    clipped: bool  # False when the sample had no crosscut region


def pick_regions(sample: SampleRecord, annotator: str | None = None) -> list[RegionAnnotation]:
    """Region set used as ground truth: a named annotator, or the latest revision."""
    if annotator is not None:
        if annotator not in sample.annotations:
            raise ValidationFailure(
                f"sample {sample.sample_id} has no annotations by {annotator!r}"
            )
        return sample.annotations[annotator]
    latest = sample.latest_annotator()
    if latest is None:
        return []
    return sample.annotations[latest]


def build_clean_mask(regions: list[RegionAnnotation], width: int, height: int,
                     hierarchy: tuple[DefectClass, ...],
                     params: MorphologyParams | None = None,
                     sample_id: str = "") -> CleanMaskResult:
    """Flatten regions into a cleaned label mask.

    Steps: hierarchical flattening, clipping to the union of the sample's
    Crosscut regions (skipped with a warning when there is none), then
    small-artifact removal when params is given.
    """
    for region in regions:
        validate_polygon_bounds(region, width, height)
    support = crosscut_support(regions, width, height)
    mask = flatten(regions, hierarchy, width, height)
    mask = clip_to_crosscut(mask, support, sample_id=sample_id)
    if params is not None:
        mask = remove_small_artifacts(mask, params, hierarchy)
    return CleanMaskResult(mask=mask, clipped=support is not None and bool(support.any()))


def parallel_map(fn, items, workers: int = 1) -> list:
    """Order-preserving map; output is independent of the worker count."""
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass
class FlattenSummary:
    written: int
    unclipped: list[str]


def flatten_manifest(manifest: DatasetManifest, variant: str,
                     annotator: str | None = None,
                     params: MorphologyParams | None = MorphologyParams(),
                     workers: int = 1,
                     mask_dir: str = "masks") -> FlattenSummary:
    """Build and store the variant's mask PNG for every annotated sample."""
    root = manifest.root()
    todo = [s for s in manifest.samples if s.annotations]

    def build(sample: SampleRecord):
        regions = pick_regions(sample, annotator)
        return build_clean_mask(regions, sample.width, sample.height,
                                manifest.hierarchy, params, sample.sample_id)

    results = parallel_map(build, todo, workers)
    unclipped = []
    for sample, result in zip(todo, results):
        rel = f"{mask_dir}/{variant}/{sample.sample_id}.png"
        write_mask_png(result.mask, root / rel)
        sample.masks[variant] = rel
        if not result.clipped:
            unclipped.append(sample.sample_id)
    return FlattenSummary(written=len(todo), unclipped=unclipped)

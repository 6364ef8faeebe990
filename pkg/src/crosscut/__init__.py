"""Mask curation and evaluation toolkit for wood-log crosscut defect datasets."""

from .classes import DEFAULT_HIERARCHY, DefectClass
from .errors import ConflictError, InputError, ToolkitError, ValidationFailure
from .manifest import DatasetManifest, SampleRecord, load_manifest, save_manifest, split
from .mask_ops import (cast_rot_maybe, clip_to_crosscut, crosscut_support, diff_overlay,
                       flatten, regions_from_mask)
from .metrics import (DEFAULT_POLICY, EdgeCasePolicy, MetricReport, aggregate, confusion,
                      evaluate_pair, model_score, pixel_diff)
from .morphology import MorphologyParams, connected_components, remove_small_artifacts
from .regions import RegionAnnotation, rasterize_region

__all__ = [
    "DEFAULT_HIERARCHY", "DefectClass",
    "ConflictError", "InputError", "ToolkitError", "ValidationFailure",
    "DatasetManifest", "SampleRecord", "load_manifest", "save_manifest", "split",
    "cast_rot_maybe", "clip_to_crosscut", "crosscut_support", "diff_overlay",
    "flatten", "regions_from_mask",
    "DEFAULT_POLICY", "EdgeCasePolicy", "MetricReport", "aggregate", "confusion",
    "evaluate_pair", "model_score", "pixel_diff",
    "MorphologyParams", "connected_components", "remove_small_artifacts",
    "RegionAnnotation", "rasterize_region",
]

__version__ = "0.1.0"

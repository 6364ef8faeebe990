"""Dataset manifest: samples, subsets, annotations, mask variants, splits, stats.

The manifest is a single JSON file (format_version 1) referencing mask PNGs
by path relative to the manifest location. See README for the full schema.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classes import (CANONICAL_NAMES, DEFAULT_HIERARCHY, NUM_CLASSES, SHORT_CODES,
                      DefectClass, parse_class_name, validate_hierarchy)
from .errors import InputError, ValidationFailure
from .maskio import read_mask_png
from .regions import RegionAnnotation

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
SUBSETS = ("examples", "warmup", "data")
SPLIT_BUCKETS = ("training", "validation", "test")
SPLIT_RATIOS = (0.6, 0.2, 0.2)
VARIANT_ORIGINAL = "original"


@dataclass
class SampleRecord:
    sample_id: str
    image: str
    width: int
    height: int
    subset: str
    annotations: dict[str, list[RegionAnnotation]] = field(default_factory=dict)
    masks: dict[str, str] = field(default_factory=dict)  # variant -> relative PNG path

    def __post_init__(self):
        if self.subset not in SUBSETS:
            raise ValidationFailure(
                f"sample {self.sample_id}: unknown subset {self.subset!r} (expected one of {SUBSETS})"
            )
        if self.width <= 0 or self.height <= 0:
            raise ValidationFailure(f"sample {self.sample_id}: non-positive image dimensions")

    def latest_annotator(self) -> str | None:
        """Most recent annotator = last key in insertion order (revisions win)."""
        keys = list(self.annotations)
        return keys[-1] if keys else None


@dataclass
class DatasetManifest:
    samples: list[SampleRecord] = field(default_factory=list)
    hierarchy: tuple[DefectClass, ...] = DEFAULT_HIERARCHY
    split_seed: int = 0
    path: Path | None = None  # where the manifest was loaded from / saved to

    def __post_init__(self):
        self.hierarchy = validate_hierarchy(self.hierarchy)
        seen = set()
        for s in self.samples:
            if s.sample_id in seen:
                raise ValidationFailure(f"duplicate sample_id {s.sample_id!r}")
            seen.add(s.sample_id)

    def sample(self, sample_id: str) -> SampleRecord:
        for s in self.samples:
            if s.sample_id == sample_id:
                return s
        raise ValidationFailure(f"unknown sample_id {sample_id!r}")

    def subset_samples(self, subset: str | None) -> list[SampleRecord]:
        if subset is None:
            return list(self.samples)
        if subset not in SUBSETS:
            raise ValidationFailure(f"unknown subset {subset!r}")
        return [s for s in self.samples if s.subset == subset]

    def root(self) -> Path:
        if self.path is None:
            raise ValidationFailure("manifest has no file location; save it first")
        return self.path.parent

    def mask_path(self, sample: SampleRecord, variant: str) -> Path:
        if variant not in sample.masks:
            raise ValidationFailure(f"sample {sample.sample_id} has no {variant!r} mask")
        return self.root() / sample.masks[variant]

    def load_mask(self, sample: SampleRecord, variant: str) -> np.ndarray:
        mask = read_mask_png(self.mask_path(sample, variant))
        if mask.shape != (sample.height, sample.width):
            raise ValidationFailure(
                f"sample {sample.sample_id}: {variant} mask shape {mask.shape} does not match "
                f"image {sample.width}x{sample.height}"
            )
        return mask


def _region_to_dict(region: RegionAnnotation) -> dict:
    d: dict = {"class": CANONICAL_NAMES[region.class_id]}
    if region.polygon is not None:
        d["polygon"] = [[float(x), float(y)] for x, y in region.polygon]
    else:
        d["rle"] = [[int(v), int(n)] for v, n in region.rle]
    d["source"] = region.source
    return d


def _region_from_dict(d: dict, annotator: str, name: str) -> RegionAnnotation:
    cls = parse_class_name(d["class"])
    polygon = [(float(x), float(y)) for x, y in d["polygon"]] if "polygon" in d else None
    rle = [(int(v), int(n)) for v, n in d["rle"]] if "rle" in d else None
    return RegionAnnotation(class_id=cls, polygon=polygon, rle=rle,
                            annotator=annotator, source=d.get("source", "human"), name=name)


def manifest_to_dict(manifest: DatasetManifest) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "split_seed": manifest.split_seed,
        "classes": {str(int(c)): CANONICAL_NAMES[c] for c in DefectClass},
        "hierarchy": [CANONICAL_NAMES[c] for c in manifest.hierarchy],
        "samples": [
            {
                "sample_id": s.sample_id,
                "image": s.image,
                "width": s.width,
                "height": s.height,
                "subset": s.subset,
                "annotations": {
                    annotator: [_region_to_dict(r) for r in regions]
                    for annotator, regions in s.annotations.items()
                },
                "masks": dict(s.masks),
            }
            for s in manifest.samples
        ],
    }


def save_manifest(manifest: DatasetManifest, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = json.dumps(manifest_to_dict(manifest), indent=2) + "\n"
    path.write_text(payload, encoding="utf-8")
    manifest.path = path
    return path


def load_manifest(path: str | Path) -> DatasetManifest:
    """Load and eagerly validate a manifest file."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"manifest not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot parse manifest {path}: {exc}") from exc

    if raw.get("format_version") != FORMAT_VERSION:
        raise ValidationFailure(
            f"unsupported manifest format_version {raw.get('format_version')!r}"
        )
    classes = raw.get("classes", {})
    for cid, cname in classes.items():
        try:
            expected = CANONICAL_NAMES[DefectClass(int(cid))]
        except ValueError:
            raise ValidationFailure(f"manifest class table holds invalid id {cid!r}")
        if parse_class_name(cname) != DefectClass(int(cid)):
            raise ValidationFailure(
                f"manifest class table maps id {cid} to {cname!r}, expected {expected!r}"
            )
    hierarchy = tuple(parse_class_name(n) for n in raw.get("hierarchy", []))
    if not hierarchy:
        hierarchy = DEFAULT_HIERARCHY

    samples = []
    for sd in raw.get("samples", []):
        sid = sd.get("sample_id")
        if not sid:
            raise ValidationFailure("sample without sample_id in manifest")
        if not sd.get("image"):
            raise ValidationFailure(f"sample {sid}: missing image reference")
        annotations = {}
        for annotator, regions in sd.get("annotations", {}).items():
            annotations[annotator] = [
                _region_from_dict(rd, annotator, name=f"{sid}/{annotator}/{i}")
                for i, rd in enumerate(regions)
            ]
        samples.append(SampleRecord(
            sample_id=sid,
            image=sd.get("image", ""),
            width=int(sd["width"]),
            height=int(sd["height"]),
            subset=sd.get("subset", "data"),
            annotations=annotations,
            masks={str(k): str(v) for k, v in sd.get("masks", {}).items()},
        ))
    manifest = DatasetManifest(
        samples=samples,
        hierarchy=hierarchy,
        split_seed=int(raw.get("split_seed", 0)),
        path=path,
    )
    return manifest


def split(manifest: DatasetManifest, seed: int | None = None) -> dict[str, str]:
    """Deterministic 0.6/0.2/0.2 split of the `data` subset.

    examples and warmup samples are never assigned. Bucket sizes follow
    largest-remainder rounding; remainder ties go to the earlier bucket.
    """
    data_ids = [s.sample_id for s in manifest.samples if s.subset == "data"]
    if not data_ids:
        raise ValidationFailure("manifest has no `data` samples to split")
    if seed is None:
        seed = manifest.split_seed
    rng = random.Random(seed)
    shuffled = sorted(data_ids)
    rng.shuffle(shuffled)

    n = len(shuffled)
    raw_sizes = [n * r for r in SPLIT_RATIOS]
    sizes = [int(x) for x in raw_sizes]
    remainders = sorted(
        range(len(SPLIT_RATIOS)),
        key=lambda i: (-(raw_sizes[i] - sizes[i]), i),
    )
    for i in range(n - sum(sizes)):
        sizes[remainders[i]] += 1

    assignment: dict[str, str] = {}
    pos = 0
    for bucket, size in zip(SPLIT_BUCKETS, sizes):
        for sid in shuffled[pos:pos + size]:
            assignment[sid] = bucket
        pos += size
    return assignment


@dataclass
class SubsetStats:
    subset: str
    n_images: int
    mean_share: dict[int, float]  # class id -> mean % of crosscut support
    excluded: list[str] = field(default_factory=list)


def class_area_stats(manifest: DatasetManifest, variant: str = VARIANT_ORIGINAL,
                     subsets: tuple[str, ...] | None = None) -> list[SubsetStats]:
    """Mean class area per subset in percent of each sample's crosscut support.

    The support is the sample's total non-background area, so the per-sample
    percentages over classes 1..6 sum to exactly 100. Samples with zero
    support are excluded and reported. A "Full Set" row over all included
    samples is prepended.
    """
    subsets = subsets or SUBSETS
    per_subset: dict[str, list[dict[int, float]]] = {s: [] for s in subsets}
    excluded: dict[str, list[str]] = {s: [] for s in subsets}
    for sample in manifest.samples:
        if sample.subset not in per_subset:
            continue
        if variant not in sample.masks:
            raise ValidationFailure(
                f"sample {sample.sample_id} has no {variant!r} mask; run flatten first"
            )
        mask = manifest.load_mask(sample, variant)
        counts = np.bincount(mask.reshape(-1), minlength=NUM_CLASSES)
        support = int(counts[1:].sum())
        if support == 0:
            log.warning("sample %s has zero crosscut area; excluded from stats", sample.sample_id)
            excluded[sample.subset].append(sample.sample_id)
            continue
        shares = {cls: 100.0 * int(counts[cls]) / support for cls in range(1, NUM_CLASSES)}
        per_subset[sample.subset].append(shares)

    def mean_row(rows: list[dict[int, float]]) -> dict[int, float]:
        if not rows:
            return {cls: 0.0 for cls in range(1, NUM_CLASSES)}
        return {cls: sum(r[cls] for r in rows) / len(rows) for cls in range(1, NUM_CLASSES)}

    all_rows = [r for s in subsets for r in per_subset[s]]
    all_excluded = [x for s in subsets for x in excluded[s]]
    out = [SubsetStats("Full Set", len(all_rows), mean_row(all_rows), all_excluded)]
    for s in subsets:
        out.append(SubsetStats(s, len(per_subset[s]), mean_row(per_subset[s]), excluded[s]))
    return out


def stats_class_order() -> list[tuple[int, str]]:
    """Column order of the stats table: CC, R, R(m), PW, DC, IC."""
    order = [DefectClass.CROSSCUT, DefectClass.ROT, DefectClass.ROT_MAYBE,
             DefectClass.PRESSURE_WOOD, DefectClass.DISCOLORATION, DefectClass.INGROWTH_CRACK]
    return [(int(c), SHORT_CODES[c]) for c in order]

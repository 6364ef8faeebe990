"""Import of LabelStudio JSON exports (polygon labels only).

Polygon points arrive in percent of the image dimensions and are scaled to
pixels on import. Results with other geometry types are skipped with a
warning and counted.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

from .classes import parse_class_name
from .errors import InputError, ValidationFailure
from .manifest import SUBSETS, SampleRecord
from .regions import RegionAnnotation

log = logging.getLogger(__name__)


def _annotator_id(annotation: dict) -> str:
    by = annotation.get("completed_by", "unknown")
    if isinstance(by, dict):
        return str(by.get("email") or by.get("id") or "unknown")
    return str(by)


def _sample_id(task: dict) -> str:
    data = task.get("data", {})
    if "sample_id" in data:
        return str(data["sample_id"])
    image = data.get("image", "")
    stem = Path(str(image)).stem
    return stem or f"task-{task.get('id', '?')}"


def import_labelstudio_export(path: str | Path) -> tuple[list[SampleRecord], int]:
    """Parse an export file into SampleRecords; returns (records, skipped_region_count)."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"export file not found: {path}")
    try:
        tasks = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot parse LabelStudio export {path}: {exc}") from exc
    if not isinstance(tasks, list):
        raise InputError(f"LabelStudio export {path} must be a JSON list of tasks")

    records: list[SampleRecord] = []
    skipped = 0
    for task in tasks:
        sid = _sample_id(task)
        data = task.get("data", {})
        subset = str(data.get("subset", "data"))
        if subset not in SUBSETS:
            raise ValidationFailure(f"task {sid}: unknown subset {subset!r}")
        width = height = 0
        annotations: dict[str, list[RegionAnnotation]] = {}
        for annotation in task.get("annotations", []):
            annotator = _annotator_id(annotation)
            regions = annotations.setdefault(annotator, [])
            for i, result in enumerate(annotation.get("result", [])):
                width = int(result.get("original_width", width) or width)
                height = int(result.get("original_height", height) or height)
                if result.get("type") != "polygonlabels":
                    skipped += 1
                    log.warning("task %s: skipping unsupported result type %r",
                                sid, result.get("type"))
                    continue
                value = result.get("value", {})
                labels = value.get("polygonlabels", [])
                if len(labels) != 1:
                    skipped += 1
                    log.warning("task %s: polygon without a single label skipped", sid)
                    continue
                points = value.get("points", [])
                polygon = [(float(x) * width / 100.0, float(y) * height / 100.0)
                           for x, y in points]
                regions.append(RegionAnnotation(
                    class_id=parse_class_name(labels[0]),
                    polygon=polygon,
                    annotator=annotator,
                    source=str(value.get("source", "human")),
                    name=f"{sid}/{annotator}/{i}",
                ))
        if width <= 0 or height <= 0:
            width = int(data.get("width", 0))
            height = int(data.get("height", 0))
        if width <= 0 or height <= 0:
            raise ValidationFailure(f"task {sid}: image dimensions unknown")
        records.append(SampleRecord(
            sample_id=sid,
            image=str(data.get("image", "")),
            width=width,
            height=height,
            subset=subset,
            annotations=annotations,
        ))
    return records, skipped

"""Annotator-drawn regions and their rasterization to binary masks.

Rasterization rule: a pixel belongs to a polygon iff its center
(x + 0.5, y + 0.5) lies inside under the even-odd rule. Crossings are
counted with half-open edge spans (min_y <= yc < max_y) and a crossing
exactly at the pixel-center x does not count, so boundary pixels resolve
deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classes import DefectClass
from .errors import ValidationFailure
from .rle import RlePairs, rle_decode

SOURCES = ("human", "model", "sam-preannotation")


@dataclass
class RegionAnnotation:
    """One annotated region: a polygon (pixel coordinates) or an RLE binary mask."""

    class_id: DefectClass
    polygon: list[tuple[float, float]] | None = None
    rle: RlePairs | None = None
    annotator: str = ""
    source: str = "human"
    name: str = ""  # diagnostic label, e.g. "task 12 region 3"

    def __post_init__(self):
        self.class_id = DefectClass(self.class_id)
        if self.class_id == DefectClass.BACKGROUND:
            raise ValidationFailure(
                f"region {self.name or '<unnamed>'}: Background cannot be annotated explicitly"
            )
        if (self.polygon is None) == (self.rle is None):
            raise ValidationFailure(
                f"region {self.name or '<unnamed>'}: exactly one of polygon or rle is required"
            )
        if self.source not in SOURCES:
            raise ValidationFailure(
                f"region {self.name or '<unnamed>'}: unknown source {self.source!r}"
            )


def _distinct_vertices(polygon: list[tuple[float, float]]) -> int:
    return len({(float(x), float(y)) for x, y in polygon})


def rasterize_polygon(polygon: list[tuple[float, float]], width: int, height: int,
                      name: str = "") -> np.ndarray:
    """Scanline even-odd fill of a closed polygon; returns a bool mask (height, width)."""
    if _distinct_vertices(polygon) < 3:
        raise ValidationFailure(
            f"region {name or '<unnamed>'}: degenerate polygon with < 3 distinct vertices"
        )
    verts = np.asarray(polygon, dtype=np.float64)
    x0, y0 = verts[:, 0], verts[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)

    out = np.zeros((height, width), dtype=bool)
    centers = np.arange(width) + 0.5
    ylo, yhi = np.minimum(y0, y1), np.maximum(y0, y1)
    dy = y1 - y0
    for row in range(height):
        yc = row + 0.5
        active = (ylo <= yc) & (yc < yhi)  # half-open: horizontal edges never cross
        if not active.any():
            continue
        t = (yc - y0[active]) / dy[active]
        xs = np.sort(x0[active] + t * (x1[active] - x0[active]))
        # parity of crossings strictly left of the pixel center
        out[row] = np.searchsorted(xs, centers, side="left") % 2 == 1
    return out


def rasterize_region(region: RegionAnnotation, width: int, height: int) -> np.ndarray:
    """Rasterize a region to a bool mask; RLE geometry is decoded verbatim."""
    if width <= 0 or height <= 0:
        raise ValidationFailure(f"mask dimensions must be positive, got {width}x{height}")
    if region.rle is not None:
        return rle_decode(region.rle, width, height, dtype=np.uint8).astype(bool)
    return rasterize_polygon(region.polygon, width, height, name=region.name)


def validate_polygon_bounds(region: RegionAnnotation, width: int, height: int) -> None:
    """Check polygon vertices lie inside [0, width] x [0, height]."""
    if region.polygon is None:
        return
    for x, y in region.polygon:
        if not (0 <= x <= width and 0 <= y <= height):
            raise ValidationFailure(
                f"region {region.name or '<unnamed>'}: vertex ({x}, {y}) outside "
                f"[0, {width}] x [0, {height}]"
            )

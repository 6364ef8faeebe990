"""Connected components and small-artifact cleanup on label masks.

Cleanup sweeps the classes from lowest to highest precedence. Per class:
small components are relabeled to the dominant label among their
border-adjacent pixels (majority vote, ties broken by precedence,
Background losing all ties), then small enclosed holes are filled with the
class. The sweep repeats until the mask stops changing, which makes the
operation idempotent; termination is guaranteed because every change
strictly reduces the total number of label components.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .classes import DefectClass, precedence_scores
from .errors import ValidationFailure

_OFFSETS_4 = ((-1, 0), (1, 0), (0, -1), (0, 1))
_OFFSETS_8 = _OFFSETS_4 + ((-1, -1), (-1, 1), (1, -1), (1, 1))


@dataclass(frozen=True)
class MorphologyParams:
    min_hole_area: int = 64
    min_object_area: int = 64
    connectivity: int = 8

    def __post_init__(self):
        if self.min_hole_area < 0 or self.min_object_area < 0:
            raise ValidationFailure("morphology area thresholds must be >= 0")
        if self.connectivity not in (4, 8):
            raise ValidationFailure(f"connectivity must be 4 or 8, got {self.connectivity}")


def _structure(connectivity: int) -> np.ndarray:
    return ndimage.generate_binary_structure(2, 1 if connectivity == 4 else 2)


def connected_components(binary: np.ndarray, connectivity: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """Label a binary mask; returns (labels, areas).

    Labels are dense from 1 in scan order, 0 marks unset pixels; areas[i]
    is the pixel count of component i + 1.
    """
    if connectivity not in (4, 8):
        raise ValidationFailure(f"connectivity must be 4 or 8, got {connectivity}")
    binary = np.asarray(binary, dtype=bool)
    labels, count = ndimage.label(binary, structure=_structure(connectivity))
    areas = np.bincount(labels.reshape(-1), minlength=count + 1)[1:]
    return labels, areas


def _border_majority(mask: np.ndarray, comp: np.ndarray, connectivity: int,
                     scores: dict[int, int]) -> int | None:
    """Most frequent label among pixels adjacent to comp; ties go to higher precedence."""
    offsets = _OFFSETS_4 if connectivity == 4 else _OFFSETS_8
    h, w = mask.shape
    ys, xs = np.nonzero(comp)
    border: set[tuple[int, int]] = set()
    for dy, dx in offsets:
        ny, nx = ys + dy, xs + dx
        ok = (ny >= 0) & (ny < h) & (nx >= 0) & (nx < w)
        border.update(zip(ny[ok].tolist(), nx[ok].tolist()))
    border -= set(zip(ys.tolist(), xs.tolist()))
    if not border:
        return None
    counts: dict[int, int] = {}
    for y, x in border:
        label = int(mask[y, x])
        counts[label] = counts.get(label, 0) + 1
    return max(counts, key=lambda lbl: (counts[lbl], scores[lbl]))


def _object_pass(mask: np.ndarray, cls: int, params: MorphologyParams,
                 scores: dict[int, int]) -> bool:
    """Relabel components of cls smaller than min_object_area; returns True on change."""
    labels, areas = connected_components(mask == cls, params.connectivity)
    small = np.nonzero(areas < params.min_object_area)[0]
    if small.size == 0:
        return False
    # Targets are decided against the snapshot, then applied together. Components
    # of one class are never adjacent, so this equals any sequential order.
    snapshot = mask.copy()
    changed = False
    for idx in small:
        comp = labels == idx + 1
        target = _border_majority(snapshot, comp, params.connectivity, scores)
        if target is None:  # component has no border: mask is a single component
            continue
        mask[comp] = target
        changed = True
    return changed


def _hole_pass(mask: np.ndarray, cls: int, params: MorphologyParams) -> bool:
    """Fill non-cls components that are enclosed by cls and smaller than min_hole_area."""
    if not (mask == cls).any():
        return False
    labels, areas = connected_components(mask != cls, params.connectivity)
    h, w = mask.shape
    touches = np.zeros(areas.size + 1, dtype=bool)
    for edge in (labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]):
        touches[np.unique(edge)] = True
    changed = False
    for idx in range(areas.size):
        if touches[idx + 1] or areas[idx] >= params.min_hole_area:
            continue
        mask[labels == idx + 1] = cls
        changed = True
    return changed


def remove_small_artifacts(mask: np.ndarray, params: MorphologyParams,
                           hierarchy: tuple[DefectClass, ...]) -> np.ndarray:
    """Remove small objects and fill small holes, class by class; see module docstring."""
    out = np.array(mask, dtype=np.uint8, copy=True)
    scores = precedence_scores(hierarchy)
    order = [int(c) for c in reversed(hierarchy)]  # lowest precedence first
    changed = True
    while changed:
        changed = False
        for cls in order:
            if params.min_object_area > 0:
                changed |= _object_pass(out, cls, params, scores)
            if params.min_hole_area > 0:
                changed |= _hole_pass(out, cls, params)
    return out

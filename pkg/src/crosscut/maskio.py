"""Mask and overlay image I/O.

Masks are stored as 8-bit single-channel indexed PNG with pixel value =
class id; the embedded palette only affects how viewers display them.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .classes import NUM_CLASSES, PALETTE, DefectClass
from .errors import InputError, ValidationFailure
from .mask_ops import validate_mask

_PALETTE_FLAT = []
for cls in DefectClass:
    _PALETTE_FLAT.extend(PALETTE[cls])
_PALETTE_FLAT.extend((0, 0, 0) * (256 - NUM_CLASSES))


def write_mask_png(mask: np.ndarray, path: str | Path) -> None:
    mask = validate_mask(mask)
    img = Image.fromarray(mask, mode="P")
    img.putpalette(_PALETTE_FLAT)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    img.save(path, format="PNG")


def read_mask_png(path: str | Path) -> np.ndarray:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"mask file not found: {path}")
    try:
        img = Image.open(path)
        img.load()
    except Exception as exc:
        raise InputError(f"cannot read mask PNG {path}: {exc}") from exc
    if img.mode not in ("P", "L"):
        raise ValidationFailure(f"mask {path} must be single-channel PNG, got mode {img.mode}")
    mask = np.asarray(img, dtype=np.uint8)
    if mask.size and int(mask.max()) >= NUM_CLASSES:
        raise ValidationFailure(f"mask {path} holds invalid class id {int(mask.max())}")
    return mask


def render_overlay(photo: Image.Image, mask: np.ndarray, alpha: float,
                   classes: set[int] | None = None) -> Image.Image:
    """Blend the class palette over the photo; Background stays fully transparent.

    `classes` restricts the overlay to the listed class ids (visibility toggles);
    None shows all non-background classes.
    """
    mask = validate_mask(mask)
    if not 0.0 <= alpha <= 1.0:
        raise ValidationFailure(f"alpha must be in [0, 1], got {alpha}")
    if photo.size != (mask.shape[1], mask.shape[0]):
        raise ValidationFailure(
            f"photo size {photo.size} does not match mask {mask.shape[1]}x{mask.shape[0]}"
        )
    base = np.asarray(photo.convert("RGB"), dtype=np.float64)
    color = np.zeros_like(base)
    painted = np.zeros(mask.shape, dtype=bool)
    for cls in DefectClass:
        if cls == DefectClass.BACKGROUND:
            continue
        if classes is not None and int(cls) not in classes:
            continue
        sel = mask == int(cls)
        color[sel] = PALETTE[cls]
        painted |= sel
    out = base.copy()
    out[painted] = (1.0 - alpha) * base[painted] + alpha * color[painted]
    return Image.fromarray(np.round(out).astype(np.uint8), mode="RGB")

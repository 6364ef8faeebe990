"""Row-major run-length codec for label and binary masks.

Format: a sequence of (value, run_length) pairs covering the mask in
row-major order. Canonical encodings have run_length >= 1 and no two
consecutive pairs with the same value; decode accepts canonical input only.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationFailure

RlePairs = list[tuple[int, int]]


def rle_encode(mask: np.ndarray) -> RlePairs:
    """Encode a 2D mask into canonical (value, run_length) pairs."""
    flat = np.asarray(mask).reshape(-1)
    if flat.size == 0:
        return []
    # boundaries where the value changes
    change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [flat.size]))
    return [(int(flat[s]), int(e - s)) for s, e in zip(starts, ends)]


def rle_decode(pairs: RlePairs, width: int, height: int, dtype=np.uint8) -> np.ndarray:
    """Decode (value, run_length) pairs into a height x width array."""
    total = width * height
    out = np.empty(total, dtype=dtype)
    pos = 0
    prev = None
    for value, length in pairs:
        if length < 1:
            raise ValidationFailure(f"RLE run length must be >= 1, got {length}")
        if prev is not None and value == prev:
            raise ValidationFailure("RLE is not canonical: consecutive runs share a value")
        if pos + length > total:
            raise ValidationFailure(f"RLE overruns mask size {width}x{height}")
        out[pos : pos + length] = value
        pos += length
        prev = value
    if pos != total:
        raise ValidationFailure(f"RLE covers {pos} pixels, mask needs {total}")
    return out.reshape(height, width)

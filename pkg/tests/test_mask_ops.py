import numpy as np
import pytest

from crosscut.classes import DEFAULT_HIERARCHY, DefectClass, precedence_scores
from crosscut.errors import ValidationFailure
from crosscut.mask_ops import (cast_rot_maybe, clip_to_crosscut, crosscut_support,
                               diff_overlay, flatten, regions_from_mask)
from crosscut.regions import RegionAnnotation

BG, CC, R = DefectClass.BACKGROUND, DefectClass.CROSSCUT, DefectClass.ROT
RM, PW, DC, IC = (DefectClass.ROT_MAYBE, DefectClass.PRESSURE_WOOD,
                  DefectClass.DISCOLORATION, DefectClass.INGROWTH_CRACK)


def square(cls, x0, y0, x1, y1, **kw):
    return RegionAnnotation(class_id=cls, polygon=[(x0, y0), (x1, y0), (x1, y1), (x0, y1)], **kw)


def test_rot_beats_crosscut_on_overlap():
    regions = [square(CC, 0, 0, 8, 8), square(R, 2, 2, 6, 6)]
    mask = flatten(regions, DEFAULT_HIERARCHY, 8, 8)
    assert mask[4, 4] == int(R)
    assert mask[0, 0] == int(CC)


def test_discoloration_beats_pressure_wood():
    regions = [square(PW, 0, 0, 4, 4), square(DC, 0, 0, 4, 4)]
    mask = flatten(regions, DEFAULT_HIERARCHY, 4, 4)
    assert (mask[:4, :4] == int(DC)).all()


def test_every_pairwise_overlap_resolves_by_precedence():
    scores = precedence_scores(DEFAULT_HIERARCHY)
    classes = list(DEFAULT_HIERARCHY)
    for i, a in enumerate(classes):
        for b in classes[i + 1:]:
            mask = flatten([square(a, 0, 0, 2, 2), square(b, 0, 0, 2, 2)],
                           DEFAULT_HIERARCHY, 2, 2)
            winner = a if scores[int(a)] > scores[int(b)] else b
            assert (mask == int(winner)).all(), f"{a.name} vs {b.name}"


def test_no_regions_gives_all_background():
    assert (flatten([], DEFAULT_HIERARCHY, 5, 3) == int(BG)).all()


def test_flatten_is_region_order_invariant():
    rng = np.random.default_rng(61)
    base = []
    for c in rng.integers(1, 7, 8):
        x0, x1 = sorted(rng.uniform(0, 10, 2).tolist())
        y0, y1 = sorted(rng.uniform(0, 10, 2).tolist())
        base.append(square(DefectClass(int(c)), x0, y0, x1 + 0.5, y1 + 0.5))
    reference = flatten(base, DEFAULT_HIERARCHY, 10, 10)
    for _ in range(20):
        perm = list(base)
        rng.shuffle(perm)
        assert np.array_equal(flatten(perm, DEFAULT_HIERARCHY, 10, 10), reference)


def test_reflattening_regions_from_mask_reproduces_it():
    regions = [square(CC, 0, 0, 8, 8), square(R, 1, 1, 4, 4), square(IC, 5, 5, 7, 7)]
    mask = flatten(regions, DEFAULT_HIERARCHY, 8, 8)
    again = flatten(regions_from_mask(mask), DEFAULT_HIERARCHY, 8, 8)
    assert np.array_equal(again, mask)


def test_clip_keeps_defects_inside_support():
    regions = [square(CC, 0, 0, 6, 6), square(R, 1, 1, 3, 3)]
    support = crosscut_support(regions, 8, 8)
    mask = flatten(regions, DEFAULT_HIERARCHY, 8, 8)
    clipped = clip_to_crosscut(mask, support)
    assert np.array_equal(clipped, mask)


def test_clip_removes_outside_defects_and_splits_straddlers():
    regions = [square(CC, 0, 0, 4, 8), square(R, 2, 2, 6, 4)]  # rot straddles x=4 edge
    support = crosscut_support(regions, 8, 8)
    mask = flatten(regions, DEFAULT_HIERARCHY, 8, 8)
    clipped = clip_to_crosscut(mask, support)
    # per-pixel oracle: defect pixels survive iff inside the support
    for (y, x), value in np.ndenumerate(mask):
        if value >= 2:
            expected = value if support[y, x] else int(BG)
            assert clipped[y, x] == expected
        else:
            assert clipped[y, x] == value
    assert (clipped[2:4, 4:6] == int(BG)).all()


def test_clip_without_support_warns_and_keeps_mask(caplog):
    mask = flatten([square(R, 0, 0, 3, 3)], DEFAULT_HIERARCHY, 4, 4)
    with caplog.at_level("WARNING"):
        out = clip_to_crosscut(mask, None, sample_id="log-7")
    assert np.array_equal(out, mask)
    assert "log-7" in caplog.text


def test_clip_is_idempotent():
    regions = [square(CC, 0, 0, 4, 8), square(R, 2, 2, 6, 4)]
    support = crosscut_support(regions, 8, 8)
    mask = flatten(regions, DEFAULT_HIERARCHY, 8, 8)
    once = clip_to_crosscut(mask, support)
    assert np.array_equal(clip_to_crosscut(once, support), once)


def test_cast_rot_maybe_noop_without_rot_maybe():
    mask = np.full((3, 3), int(CC), dtype=np.uint8)
    assert np.array_equal(cast_rot_maybe(mask, R), mask)


def test_cast_all_rot_maybe_to_rot():
    mask = np.full((2, 2), int(RM), dtype=np.uint8)
    assert (cast_rot_maybe(mask, R) == int(R)).all()


def test_cast_bookkeeping_to_crosscut():
    rng = np.random.default_rng(67)
    mask = rng.integers(0, 7, size=(9, 9)).astype(np.uint8)
    before = np.bincount(mask.reshape(-1), minlength=7)
    out = cast_rot_maybe(mask, CC)
    after = np.bincount(out.reshape(-1), minlength=7)
    assert after[int(RM)] == 0
    assert after[int(R)] == before[int(R)]
    assert after[int(CC)] == before[int(CC)] + before[int(RM)]
    for cls in (0, 4, 5, 6):
        assert after[cls] == before[cls]


def test_cast_rejects_other_targets():
    mask = np.zeros((2, 2), dtype=np.uint8)
    with pytest.raises(ValidationFailure):
        cast_rot_maybe(mask, DefectClass.DISCOLORATION)


def test_diff_overlay_cases():
    rng = np.random.default_rng(71)
    a = rng.integers(0, 7, size=(8, 8)).astype(np.uint8)
    assert not diff_overlay(a, a).any()
    b = a.copy()
    b[3, 5] = (b[3, 5] + 1) % 7
    assert diff_overlay(a, b).sum() == 1
    c = rng.integers(0, 7, size=(8, 8)).astype(np.uint8)
    want = sum(1 for (y, x), v in np.ndenumerate(a) if v != c[y, x])
    assert diff_overlay(a, c).sum() == want


def test_diff_overlay_rejects_mismatched_shapes():
    with pytest.raises(ValidationFailure):
        diff_overlay(np.zeros((2, 2), dtype=np.uint8), np.zeros((2, 3), dtype=np.uint8))

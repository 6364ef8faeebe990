import numpy as np
import pytest

from crosscut.classes import DEFAULT_HIERARCHY, DefectClass
from crosscut.errors import ValidationFailure
from crosscut.morphology import MorphologyParams, connected_components, remove_small_artifacts

from oracles import bfs_components, naive_remove_small_artifacts

CC = int(DefectClass.CROSSCUT)
R = int(DefectClass.ROT)


def as_partition(labels):
    comps = {}
    for (y, x), lbl in np.ndenumerate(labels):
        if lbl:
            comps.setdefault(int(lbl), set()).add((y, x))
    return {frozenset(c) for c in comps.values()}


def test_all_zero_mask_has_no_components():
    labels, areas = connected_components(np.zeros((4, 4), dtype=bool), 8)
    assert labels.max() == 0 and areas.size == 0


def test_diagonal_touching_pixels_depend_on_connectivity():
    binary = np.zeros((3, 3), dtype=bool)
    binary[0, 0] = binary[1, 1] = True
    _, areas8 = connected_components(binary, 8)
    _, areas4 = connected_components(binary, 4)
    assert areas8.tolist() == [2]
    assert sorted(areas4.tolist()) == [1, 1]


def test_labels_dense_from_one_and_areas_exact():
    binary = np.array([[1, 0, 1], [0, 0, 1], [1, 0, 0]], dtype=bool)
    labels, areas = connected_components(binary, 4)
    assert sorted(np.unique(labels).tolist()) == [0, 1, 2, 3]
    assert sorted(areas.tolist()) == [1, 1, 2]
    assert areas.sum() == binary.sum()


@pytest.mark.parametrize("connectivity", [4, 8])
def test_partition_matches_bfs_oracle(connectivity):
    rng = np.random.default_rng(31)
    for _ in range(40):
        binary = rng.random((32, 32)) < rng.uniform(0.2, 0.8)
        labels, areas = connected_components(binary, connectivity)
        oracle = {frozenset(c) for c in bfs_components(binary, connectivity)}
        assert as_partition(labels) == oracle
        assert sorted(areas.tolist()) == sorted(len(c) for c in oracle)


def test_bad_connectivity_rejected():
    with pytest.raises(ValidationFailure):
        connected_components(np.zeros((2, 2), dtype=bool), 6)
    with pytest.raises(ValidationFailure):
        MorphologyParams(connectivity=5)
    with pytest.raises(ValidationFailure):
        MorphologyParams(min_hole_area=-1)


def test_single_small_object_relabeled_to_surround():
    mask = np.full((6, 6), CC, dtype=np.uint8)
    mask[3, 3] = R
    params = MorphologyParams(min_hole_area=0, min_object_area=8, connectivity=8)
    out = remove_small_artifacts(mask, params, DEFAULT_HIERARCHY)
    assert (out == CC).all()


def test_large_object_untouched():
    mask = np.full((12, 12), CC, dtype=np.uint8)
    mask[1:11, 1:11] = R  # area 100
    params = MorphologyParams(min_hole_area=0, min_object_area=8, connectivity=8)
    out = remove_small_artifacts(mask, params, DEFAULT_HIERARCHY)
    assert np.array_equal(out, mask)


def test_small_hole_filled_with_enclosing_class():
    mask = np.full((8, 8), CC, dtype=np.uint8)
    mask[3:5, 3:5] = 0  # 4-pixel background hole inside crosscut
    params = MorphologyParams(min_hole_area=8, min_object_area=0, connectivity=8)
    out = remove_small_artifacts(mask, params, DEFAULT_HIERARCHY)
    assert (out == CC).all()


def test_border_touching_region_is_not_a_hole():
    mask = np.full((8, 8), CC, dtype=np.uint8)
    mask[0:2, 3:5] = 0
    params = MorphologyParams(min_hole_area=8, min_object_area=0, connectivity=8)
    out = remove_small_artifacts(mask, params, DEFAULT_HIERARCHY)
    assert np.array_equal(out, mask)


def _random_blob_mask(rng, h, w):
    mask = np.zeros((h, w), dtype=np.uint8)
    for _ in range(int(rng.integers(2, 7))):
        cls = int(rng.integers(0, 7))
        y0, x0 = int(rng.integers(0, h)), int(rng.integers(0, w))
        bh, bw = int(rng.integers(1, h // 2 + 1)), int(rng.integers(1, w // 2 + 1))
        mask[y0:y0 + bh, x0:x0 + bw] = cls
    return mask


@pytest.mark.parametrize("connectivity", [4, 8])
def test_cleanup_matches_flood_fill_oracle(connectivity):
    rng = np.random.default_rng(47)
    params = MorphologyParams(min_hole_area=8, min_object_area=8, connectivity=connectivity)
    for trial in range(25):
        mask = rng.integers(0, 7, size=(16, 16)).astype(np.uint8)
        got = remove_small_artifacts(mask, params, DEFAULT_HIERARCHY)
        want = naive_remove_small_artifacts(mask, 8, 8, connectivity, DEFAULT_HIERARCHY)
        assert np.array_equal(got, want), f"iid trial {trial}"
    for trial in range(25):
        mask = _random_blob_mask(rng, 24, 24)
        got = remove_small_artifacts(mask, params, DEFAULT_HIERARCHY)
        want = naive_remove_small_artifacts(mask, 8, 8, connectivity, DEFAULT_HIERARCHY)
        assert np.array_equal(got, want), f"blob trial {trial}"


def test_cleanup_is_idempotent():
    rng = np.random.default_rng(53)
    params = MorphologyParams(min_hole_area=8, min_object_area=8, connectivity=8)
    for _ in range(20):
        mask = rng.integers(0, 7, size=(16, 16)).astype(np.uint8)
        once = remove_small_artifacts(mask, params, DEFAULT_HIERARCHY)
        twice = remove_small_artifacts(once, params, DEFAULT_HIERARCHY)
        assert np.array_equal(once, twice)


def test_cleanup_never_emits_invalid_class():
    rng = np.random.default_rng(59)
    params = MorphologyParams(min_hole_area=4, min_object_area=4, connectivity=4)
    for _ in range(10):
        mask = _random_blob_mask(rng, 20, 20)
        out = remove_small_artifacts(mask, params, DEFAULT_HIERARCHY)
        assert out.max() <= 6

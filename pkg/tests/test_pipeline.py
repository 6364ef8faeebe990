import pytest

from crosscut.classes import DEFAULT_HIERARCHY, DefectClass
from crosscut.errors import ValidationFailure
from crosscut.manifest import DatasetManifest, SampleRecord, load_manifest, save_manifest
from crosscut.morphology import MorphologyParams
from crosscut.pipeline import build_clean_mask, flatten_manifest, parallel_map, pick_regions
from crosscut.regions import RegionAnnotation

BG, CC, R = 0, 1, 2


def square(cls, x0, y0, x1, y1):
    return RegionAnnotation(class_id=cls,
                            polygon=[(x0, y0), (x1, y0), (x1, y1), (x0, y1)])


def test_build_clean_mask_clips_and_cleans():
    regions = [square(DefectClass.CROSSCUT, 0, 0, 8, 8),
               square(DefectClass.ROT, 2, 2, 5, 5),
               square(DefectClass.ROT, 9, 9, 11, 11)]  # outside the crosscut
    result = build_clean_mask(regions, 12, 12, DEFAULT_HIERARCHY,
                              MorphologyParams(min_hole_area=0, min_object_area=0))
    assert result.clipped
    assert (result.mask[9:11, 9:11] == BG).all()
    assert (result.mask[2:5, 2:5] == R).all()


def test_build_clean_mask_without_crosscut_flags_sample():
    regions = [square(DefectClass.ROT, 1, 1, 3, 3)]
    result = build_clean_mask(regions, 6, 6, DEFAULT_HIERARCHY, None)
    assert not result.clipped
    assert (result.mask[1:3, 1:3] == R).all()


def test_build_clean_mask_runs_morphology():
    regions = [square(DefectClass.CROSSCUT, 0, 0, 10, 10),
               square(DefectClass.ROT, 4, 4, 5, 5)]  # single-pixel rot speck
    params = MorphologyParams(min_hole_area=0, min_object_area=4)
    result = build_clean_mask(regions, 10, 10, DEFAULT_HIERARCHY, params)
    assert (result.mask == CC).all()


def test_build_clean_mask_validates_bounds():
    regions = [square(DefectClass.ROT, 0, 0, 20, 20)]
    with pytest.raises(ValidationFailure):
        build_clean_mask(regions, 10, 10, DEFAULT_HIERARCHY, None)


def test_pick_regions_latest_revision_wins():
    first = [square(DefectClass.ROT, 0, 0, 2, 2)]
    second = [square(DefectClass.CROSSCUT, 0, 0, 4, 4)]
    sample = SampleRecord(sample_id="s", image="", width=4, height=4, subset="data",
                          annotations={"C": first, "B": second})
    assert pick_regions(sample) is second
    assert pick_regions(sample, "C") is first
    with pytest.raises(ValidationFailure):
        pick_regions(sample, "Z")


def test_parallel_map_order_is_stable():
    items = list(range(40))
    assert parallel_map(lambda x: x * x, items, workers=1) == \
           parallel_map(lambda x: x * x, items, workers=4)


def test_flatten_manifest_writes_masks_and_updates_entries(tmp_path):
    regions = {"A": [square(DefectClass.CROSSCUT, 0, 0, 6, 6),
                     square(DefectClass.ROT, 1, 1, 3, 3)]}
    samples = [SampleRecord(sample_id=f"s{i}", image=f"images/s{i}.jpg", width=6, height=6,
                            subset="data", annotations=dict(regions)) for i in range(3)]
    manifest = DatasetManifest(samples=samples)
    save_manifest(manifest, tmp_path / "m.json")
    summary = flatten_manifest(manifest, "original", params=None, workers=2)
    save_manifest(manifest, tmp_path / "m.json")
    assert summary.written == 3 and summary.unclipped == []
    reloaded = load_manifest(tmp_path / "m.json")
    for sample in reloaded.samples:
        mask = reloaded.load_mask(sample, "original")
        assert (mask[1:3, 1:3] == R).all()
        assert mask[5, 5] == CC

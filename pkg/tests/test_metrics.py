from fractions import Fraction

import numpy as np
import pytest

from crosscut.errors import ValidationFailure
from crosscut.metrics import (EDGE_BOTH_ABSENT, EdgeCasePolicy, EDGE_NORMAL, EDGE_ONE_ABSENT,
                              aggregate, class_counts, class_metrics, confusion, edge_state,
                              evaluate_pair, histogram, histogram_from_reports, model_score,
                              multiclass_kappa, pixel_diff)

from oracles import (assert_float_equals_fraction, brute_class_metrics, brute_counts,
                     brute_multiclass_kappa, brute_pixel_diff)

BG, CC, R = 0, 1, 2


def masks_from_lists(gt_rows, pred_rows):
    return np.array(gt_rows, dtype=np.uint8), np.array(pred_rows, dtype=np.uint8)


def test_confusion_diagonal_for_identical_masks():
    rng = np.random.default_rng(3)
    mask = rng.integers(0, 7, size=(6, 6)).astype(np.uint8)
    cm = confusion(mask, mask)
    assert cm.sum() == 36
    assert (cm == np.diag(np.diag(cm))).all()


def test_confusion_single_offdiagonal_entry():
    gt = np.zeros((4, 4), dtype=np.uint8)
    pred = np.full((4, 4), CC, dtype=np.uint8)
    cm = confusion(gt, pred)
    assert cm[0, 1] == 16 and cm.sum() == 16


def test_confusion_matches_per_pixel_tally():
    rng = np.random.default_rng(5)
    gt = rng.integers(0, 7, size=(8, 8)).astype(np.uint8)
    pred = rng.integers(0, 7, size=(8, 8)).astype(np.uint8)
    cm = confusion(gt, pred)
    for cls in range(7):
        tp, fp, fn, tn = brute_counts(gt, pred, cls)
        assert class_counts(cm, cls) == (tp, fp, fn, tn)


def test_confusion_rejects_shape_mismatch():
    with pytest.raises(ValidationFailure):
        confusion(np.zeros((2, 2), dtype=np.uint8), np.zeros((3, 2), dtype=np.uint8))


def test_hand_built_counts_give_known_metrics():
    # gt rot on cells 0..5, pred rot on 2..7 -> tp=4, fp=2, fn=2
    gt = np.zeros(16, dtype=np.uint8)
    pred = np.zeros(16, dtype=np.uint8)
    gt[:6] = R
    pred[2:8] = R
    cm = confusion(gt.reshape(4, 4), pred.reshape(4, 4))
    tp, fp, fn, _ = class_counts(cm, R)
    assert (tp, fp, fn) == (4, 2, 2)
    values = class_metrics(cm, R)
    assert values["precision"] == values["recall"] == values["f1"] == 2 / 3
    assert values["iou"] == 0.5


def test_edge_case_best_when_absent_from_both():
    gt = np.full((3, 3), CC, dtype=np.uint8)
    pred = np.full((3, 3), CC, dtype=np.uint8)
    cm = confusion(gt, pred)
    assert edge_state(cm, R) == EDGE_BOTH_ABSENT
    values = class_metrics(cm, R)
    assert values["f1"] == 1.0 and values["kappa"] == 1.0 and values["pixel_diff"] == 0.0


def test_edge_case_worst_when_absent_from_one():
    gt = np.full((3, 3), CC, dtype=np.uint8)
    gt[0, 0] = R
    pred = np.full((3, 3), CC, dtype=np.uint8)
    cm = confusion(gt, pred)
    assert edge_state(cm, R) == EDGE_ONE_ABSENT
    values = class_metrics(cm, R)
    assert values["f1"] == 0.0 and values["kappa"] == -1.0
    # pixel_diff keeps its raw, well-defined value: 1 missed rot / 9 non-bg gt px
    assert values["pixel_diff"] == 1 / 9


def test_perfect_agreement_with_class_present():
    gt = np.full((3, 3), CC, dtype=np.uint8)
    gt[1, 1] = R
    cm = confusion(gt, gt)
    assert edge_state(cm, R) == EDGE_NORMAL
    values = class_metrics(cm, R)
    assert values["f1"] == values["iou"] == values["kappa"] == 1.0


def test_pixel_diff_hand_case():
    # gt: 100 crosscut pixels; pred: 90 crosscut + 10 rot
    gt = np.full((10, 10), CC, dtype=np.uint8)
    pred = np.full((10, 10), CC, dtype=np.uint8)
    pred.reshape(-1)[:10] = R
    cm = confusion(gt, pred)
    assert pixel_diff(cm, R) == 0.10
    assert pixel_diff(cm, CC) == 0.10
    assert pixel_diff(cm) == 0.20  # rot FP + crosscut FN over 100


def test_pixel_diff_undefined_for_background_only_gt():
    gt = np.zeros((3, 3), dtype=np.uint8)
    pred = np.full((3, 3), CC, dtype=np.uint8)
    with pytest.raises(ValidationFailure):
        pixel_diff(confusion(gt, pred))


def test_edge_case_policy_rejects_inverted_orientation():
    with pytest.raises(ValidationFailure):
        EdgeCasePolicy(best={"f1": 0.0, "iou": 1.0, "precision": 1.0, "recall": 1.0,
                             "accuracy": 1.0, "kappa": 1.0, "pixel_diff": 0.0},
                       worst={"f1": 1.0, "iou": 0.0, "precision": 0.0, "recall": 0.0,
                              "accuracy": 0.0, "kappa": -1.0, "pixel_diff": 1.0})


def test_model_score_formula():
    assert model_score(1.0, 1.0, 1.0) == 100.0
    assert model_score(0.78, 0.63, 0.52) == pytest.approx(64.0)
    assert model_score(0.85, 0.75, 0.68) == pytest.approx(75.75)
    with pytest.raises(ValidationFailure):
        model_score(1.2, 0.5, 0.5)


def test_model_score_monotone_in_each_input():
    rng = np.random.default_rng(9)
    for _ in range(50):
        a, r, i = rng.random(3)
        bump = rng.uniform(0, 1 - max(a, r, i))
        assert model_score(a + bump, r, i) >= model_score(a, r, i)
        assert model_score(a, r + bump, i) >= model_score(a, r, i)
        assert model_score(a, r, i + bump) >= model_score(a, r, i)


def test_evaluate_pair_identical_masks_is_perfect():
    rng = np.random.default_rng(13)
    mask = rng.integers(0, 7, size=(9, 9)).astype(np.uint8)
    report, _ = evaluate_pair(mask, mask)
    assert report.model_score == 100.0
    assert report.kappa_all_multiclass == 1.0
    assert report.accuracy_all_multiclass == 1.0
    assert all(v == 1.0 for v in report.f1.values())
    assert report.pixel_diff_all == 0.0


def test_evaluate_pair_total_disagreement_is_poor():
    gt = np.full((4, 4), R, dtype=np.uint8)
    pred = np.full((4, 4), CC, dtype=np.uint8)
    report, _ = evaluate_pair(gt, pred)
    assert report.f1[R] == 0.0 and report.f1[CC] == 0.0
    assert report.pixel_diff_all == 2.0  # every pixel is one FP and one FN


def test_metrics_match_brute_force_oracle():
    rng = np.random.default_rng(17)
    for trial in range(60):
        h, w = int(rng.integers(1, 9)), int(rng.integers(1, 9))
        gt = rng.integers(0, 7, size=(h, w)).astype(np.uint8)
        pred = rng.integers(0, 7, size=(h, w)).astype(np.uint8)
        cm = confusion(gt, pred)
        for cls in range(7):
            got = class_metrics(cm, cls)
            want = brute_class_metrics(gt, pred, cls)
            for name in ("precision", "recall", "f1", "iou", "accuracy", "kappa"):
                assert_float_equals_fraction(got[name], want[name], f"{trial}/{cls}/{name}")
            if want["pixel_diff"] is None:
                assert "pixel_diff" not in got
            else:
                assert_float_equals_fraction(got["pixel_diff"], want["pixel_diff"],
                                             f"{trial}/{cls}/pixel_diff")
        assert_float_equals_fraction(multiclass_kappa(cm), brute_multiclass_kappa(gt, pred),
                                     f"{trial}/kappa_all")
        pd_all = brute_pixel_diff(gt, pred, None)
        if pd_all is not None:
            assert_float_equals_fraction(pixel_diff(cm), pd_all, f"{trial}/pd_all")


def test_f1_iou_identity_on_non_edge_cases():
    rng = np.random.default_rng(19)
    checked = 0
    for _ in range(40):
        gt = rng.integers(0, 4, size=(6, 6)).astype(np.uint8)
        pred = rng.integers(0, 4, size=(6, 6)).astype(np.uint8)
        cm = confusion(gt, pred)
        for cls in range(7):
            if edge_state(cm, cls) != EDGE_NORMAL:
                continue
            tp, fp, fn, _ = class_counts(cm, cls)
            f1 = Fraction(2 * tp, 2 * tp + fp + fn)
            iou = Fraction(tp, tp + fp + fn)
            assert f1 == 2 * iou / (1 + iou)
            checked += 1
    assert checked > 50


def test_swapping_masks_transposes_confusion_and_swaps_precision_recall():
    rng = np.random.default_rng(23)
    gt = rng.integers(0, 7, size=(8, 8)).astype(np.uint8)
    pred = rng.integers(0, 7, size=(8, 8)).astype(np.uint8)
    cm, cm_swapped = confusion(gt, pred), confusion(pred, gt)
    assert np.array_equal(cm_swapped, cm.T)
    for cls in range(7):
        a, b = class_metrics(cm, cls), class_metrics(cm_swapped, cls)
        assert a["precision"] == b["recall"] and a["recall"] == b["precision"]
        for sym in ("f1", "iou", "kappa", "accuracy"):
            assert a[sym] == b[sym]


def test_pixel_diff_all_bounds_sum_of_classwise():
    rng = np.random.default_rng(29)
    for _ in range(30):
        gt = rng.integers(0, 7, size=(8, 8)).astype(np.uint8)
        pred = rng.integers(0, 7, size=(8, 8)).astype(np.uint8)
        cm = confusion(gt, pred)
        total = pixel_diff(cm)
        class_sum = sum(pixel_diff(cm, cls) for cls in range(7))
        assert total <= class_sum + 1e-12
        assert class_sum <= 2 * total + 1e-12


def test_aggregate_single_sample_equals_itself():
    rng = np.random.default_rng(37)
    gt = rng.integers(0, 7, size=(6, 6)).astype(np.uint8)
    pred = rng.integers(0, 7, size=(6, 6)).astype(np.uint8)
    report, cm = evaluate_pair(gt, pred)
    agg, micro = aggregate([report], [cm])
    assert agg.f1 == report.f1
    assert agg.model_score == report.model_score
    assert np.array_equal(micro, cm)


def test_aggregate_macro_mean():
    gt1 = np.full((2, 2), R, dtype=np.uint8)
    pred1 = gt1.copy()
    r1, cm1 = evaluate_pair(gt1, pred1)  # f1_R = 1.0
    gt2 = np.full((2, 2), R, dtype=np.uint8)
    pred2 = np.array([[R, R], [CC, CC]], dtype=np.uint8)
    r2, cm2 = evaluate_pair(gt2, pred2)
    agg, _ = aggregate([r1, r2], [cm1, cm2])
    assert agg.f1[R] == (r1.f1[R] + r2.f1[R]) / 2


def test_micro_confusion_equals_concatenated_streams():
    rng = np.random.default_rng(41)
    pairs = [(rng.integers(0, 7, size=(5, 5)).astype(np.uint8),
              rng.integers(0, 7, size=(5, 5)).astype(np.uint8)) for _ in range(4)]
    reports, cms = zip(*(evaluate_pair(g, p) for g, p in pairs))
    _, micro = aggregate(list(reports), list(cms))
    cat_gt = np.concatenate([g.reshape(1, -1) for g, _ in pairs], axis=1)
    cat_pred = np.concatenate([p.reshape(1, -1) for _, p in pairs], axis=1)
    assert np.array_equal(micro, confusion(cat_gt, cat_pred))


def test_aggregate_rejects_empty():
    with pytest.raises(ValidationFailure):
        aggregate([], [])


def test_aggregate_excludes_undefined_pixel_diff_only():
    gt_ok = np.full((2, 2), CC, dtype=np.uint8)
    r1, cm1 = evaluate_pair(gt_ok, gt_ok)
    gt_bg = np.zeros((2, 2), dtype=np.uint8)
    r2, cm2 = evaluate_pair(gt_bg, gt_bg)
    assert r2.pixel_diff is None
    agg, _ = aggregate([r1, r2], [cm1, cm2])
    assert agg.pixel_diff_all == r1.pixel_diff_all  # only the defined sample counts
    assert agg.n_samples == 2


def test_histogram_hand_binning():
    values = [0.05, 0.15, 0.15, 0.5, 0.95, 1.0, 0.31, 0.33, 0.77, 0.62]
    h = histogram(values, "f1", "R", bins=5)
    assert h.counts == [3, 2, 1, 2, 2]
    assert sum(h.counts) == len(values)
    assert h.edges[0] == 0.0 and h.edges[-1] == 1.0


def test_histogram_extremes_capture_edge_values():
    h = histogram([1.0] * 7, "iou", "All", bins=4)
    assert h.counts == [0, 0, 0, 7]
    h2 = histogram([0.0, 1.4], "pixel_diff", "All", bins=4)  # beyond-range lands in top bin
    assert h2.counts == [1, 0, 0, 1]


def test_histogram_from_reports_skips_undefined():
    gt = np.zeros((2, 2), dtype=np.uint8)
    r, _ = evaluate_pair(gt, gt)
    h = histogram_from_reports([r], "pixel_diff", "All", bins=3)
    assert sum(h.counts) == 0
    h2 = histogram_from_reports([r], "f1", "All", bins=3)
    assert sum(h2.counts) == 1

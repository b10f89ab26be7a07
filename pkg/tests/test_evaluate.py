import csv
import math

import numpy as np
import pytest

from acdkit import (
    AnomalyMap,
    EmptyClass,
    GridMismatch,
    GroundTruth,
    RocCurve,
    auc,
    pauc,
    render_loglog_svg,
    roc,
    write_roc_csv,
)


def _gt(inner, outer=None):
    inner = np.asarray(inner, bool)
    return GroundTruth(inner, inner if outer is None else np.asarray(outer, bool))


def _amap(scores):
    return AnomalyMap(np.asarray(scores, dtype=np.float64))


FOUR_PIXEL_MAP = _amap([[0.9, 0.8], [0.2, 0.1]])
FOUR_PIXEL_GT = _gt([[True, True], [False, False]])


def test_four_pixel_fixture_hand_enumeration():
    band = roc(FOUR_PIXEL_MAP, FOUR_PIXEL_GT)
    c = band.inner_curve
    # thresholds: above-max, then each distinct score
    assert c.thresholds.tolist() == [math.inf, 0.9, 0.8, 0.2, 0.1]
    assert c.fpr.tolist() == [0.0, 0.0, 0.0, 0.5, 1.0]
    assert c.tpr.tolist() == [0.0, 0.5, 1.0, 1.0, 1.0]
    assert band.pauc_inner == pytest.approx(0.01, abs=1e-15)
    assert band.pauc_outer == pytest.approx(0.01, abs=1e-15)


def test_inner_equals_outer_gives_identical_curves():
    band = roc(FOUR_PIXEL_MAP, FOUR_PIXEL_GT)
    assert band.inner_curve.points == band.outer_curve.points


def test_constant_map_is_two_endpoints():
    band = roc(_amap([[1.0, 1.0, 1.0]]), _gt([[True, False, False]]))
    c = band.inner_curve
    assert c.thresholds.tolist() == [math.inf, 1.0]
    assert c.fpr.tolist() == [0.0, 1.0]
    assert c.tpr.tolist() == [0.0, 1.0]


def test_tie_grouping_moves_classes_together():
    # two pixels share score 0.5: one positive, one negative
    band = roc(_amap([[0.5, 0.5], [0.1, 0.9]]),
               _gt([[True, False], [False, True]]))
    c = band.inner_curve
    assert c.thresholds.tolist() == [math.inf, 0.9, 0.5, 0.1]
    assert c.fpr.tolist() == [0.0, 0.0, 0.5, 1.0]
    assert c.tpr.tolist() == [0.0, 0.5, 1.0, 1.0]


def test_ambiguous_band_excluded_from_inner_curve():
    # outer-minus-inner pixel scores highest: outer curve counts it as a
    # positive, the inner curve ignores it entirely
    amap = _amap([[0.9, 0.8, 0.2, 0.1]])
    inner = np.array([[False, True, False, False]])
    outer = np.array([[True, True, False, False]])
    band = roc(amap, _gt(inner, outer))
    assert band.inner_curve.tpr.tolist() == [0.0, 0.0, 1.0, 1.0, 1.0]
    assert band.outer_curve.tpr.tolist() == [0.0, 0.5, 1.0, 1.0, 1.0]
    # negatives (complement of outer) identical for both curves
    assert band.inner_curve.fpr.tolist() == band.outer_curve.fpr.tolist()


def test_grid_mismatch():
    with pytest.raises(GridMismatch):
        roc(_amap([[1.0]]), FOUR_PIXEL_GT)


def test_empty_class():
    with pytest.raises(EmptyClass):
        roc(FOUR_PIXEL_MAP, _gt(np.zeros((2, 2), bool)))
    with pytest.raises(EmptyClass):
        roc(FOUR_PIXEL_MAP, _gt(np.ones((2, 2), bool)))
    # empty inner with a usable outer is still an error for the inner curve
    with pytest.raises(EmptyClass):
        roc(FOUR_PIXEL_MAP, _gt(np.zeros((2, 2), bool), [[True, False], [False, False]]))


def test_pauc_perfect_detector():
    c = RocCurve([math.inf, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 1.0])
    assert pauc(c, 0.01) == pytest.approx(0.01, abs=1e-15)
    assert auc(c) == pytest.approx(1.0, abs=1e-15)


def test_pauc_chance_diagonal():
    c = RocCurve([math.inf, 0.0], [0.0, 1.0], [0.0, 1.0])
    assert pauc(c, 0.01) == pytest.approx(5e-5, abs=1e-18)
    assert auc(c) == pytest.approx(0.5, abs=1e-15)


def test_pauc_right_edge_interpolation():
    # step to tpr=0.4 at fpr=0.2: pAUC@0.1 is half a triangle-free rectangle
    c = RocCurve([math.inf, 1.0, 0.0], [0.0, 0.2, 1.0], [0.0, 0.4, 1.0])
    assert pauc(c, 0.1) == pytest.approx(0.5 * 0.1 * 0.2, abs=1e-15)


def test_pauc_domain():
    c = RocCurve([math.inf, 0.0], [0.0, 1.0], [0.0, 1.0])
    for bad in (0.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            pauc(c, bad)


def _random_band(rng):
    h, w = int(rng.integers(2, 7)), int(rng.integers(2, 7))
    # quantized scores force ties
    scores = np.round(rng.normal(size=(h, w)), 1)
    outer = rng.random((h, w)) < 0.4
    inner = outer & (rng.random((h, w)) < 0.7)
    if not inner.any() or outer.all():
        return None
    return roc(_amap(scores), _gt(inner, outer))


def test_monotonicity_property_random():
    rng = np.random.default_rng(31)
    tested = 0
    while tested < 300:
        band = _random_band(rng)
        if band is None:
            continue
        tested += 1
        for c in (band.inner_curve, band.outer_curve):
            assert np.all(np.diff(c.fpr) >= 0)
            assert np.all(np.diff(c.tpr) >= 0)
            assert c.fpr[0] == c.tpr[0] == 0.0
            assert c.fpr[-1] == c.tpr[-1] == 1.0


def test_order_invariance_under_monotone_transform():
    rng = np.random.default_rng(32)
    scores = np.round(rng.normal(size=(8, 8)), 1)
    outer = rng.random((8, 8)) < 0.35
    inner = outer & (rng.random((8, 8)) < 0.8)
    gt = _gt(inner, outer)
    b1 = roc(_amap(scores), gt)
    b2 = roc(_amap(scores**3), gt)  # strictly increasing on all reals
    for a, b in ((b1.inner_curve, b2.inner_curve), (b1.outer_curve, b2.outer_curve)):
        assert a.fpr.tolist() == b.fpr.tolist()
        assert a.tpr.tolist() == b.tpr.tolist()
    assert b1.pauc_inner == b2.pauc_inner


def test_dominance_sanity():
    rng = np.random.default_rng(33)
    inner = np.zeros((10, 10), bool)
    inner[2:5, 2:5] = True
    scores = rng.random((10, 10))
    scores[inner] += 2.0  # strict separation
    band = roc(_amap(scores), _gt(inner), fpr_max=0.01)
    assert band.pauc_inner == pytest.approx(0.01, abs=1e-15)
    assert band.pauc_outer == pytest.approx(0.01, abs=1e-15)


def test_csv_round_trip(tmp_path):
    band = roc(FOUR_PIXEL_MAP, FOUR_PIXEL_GT)
    path = str(tmp_path / "roc.csv")
    write_roc_csv(band, path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["threshold", "fpr_inner", "tpr_inner", "fpr_outer", "tpr_outer"]
    assert len(rows) == 1 + band.inner_curve.thresholds.size
    parsed = np.array([[float(v) for v in row] for row in rows[1:]])
    assert np.array_equal(parsed[:, 0], band.inner_curve.thresholds)
    assert np.array_equal(parsed[:, 1], band.inner_curve.fpr)
    assert np.array_equal(parsed[:, 2], band.inner_curve.tpr)
    assert np.array_equal(parsed[:, 3], band.outer_curve.fpr)
    assert np.array_equal(parsed[:, 4], band.outer_curve.tpr)


def test_csv_two_point_band(tmp_path):
    band = roc(_amap([[1.0, 1.0, 1.0]]), _gt([[True, False, False]]))
    path = str(tmp_path / "two.csv")
    write_roc_csv(band, path)
    with open(path) as fh:
        assert len(fh.read().strip().splitlines()) == 3  # header + 2 points


def test_svg_structure_and_clipping(tmp_path):
    band = roc(FOUR_PIXEL_MAP, FOUR_PIXEL_GT)
    path = str(tmp_path / "roc.svg")
    render_loglog_svg({"fixture": band}, path)
    text = open(path).read()
    assert text.count("<polyline") == 2
    assert "fixture" in text
    assert text.startswith("<?xml")
    assert "false positive rate" in text and "true positive rate" in text
    assert "-inf" not in text and "nan" not in text  # zero rates were clipped


def test_svg_deterministic_bytes(tmp_path):
    band = roc(FOUR_PIXEL_MAP, FOUR_PIXEL_GT)
    p1, p2 = str(tmp_path / "a.svg"), str(tmp_path / "b.svg")
    render_loglog_svg({"x": band}, p1)
    render_loglog_svg({"x": band}, p2)
    assert open(p1, "rb").read() == open(p2, "rb").read()


def test_svg_multiple_bands(tmp_path):
    b1 = roc(FOUR_PIXEL_MAP, FOUR_PIXEL_GT)
    b2 = roc(_amap([[0.1, 0.2], [0.9, 0.8]]), FOUR_PIXEL_GT)
    path = str(tmp_path / "multi.svg")
    render_loglog_svg({"good": b1, "bad": b2}, path)
    text = open(path).read()
    assert text.count("<polyline") == 4
    assert "good" in text and "bad" in text


def test_svg_requires_a_band(tmp_path):
    with pytest.raises(ValueError):
        render_loglog_svg({}, str(tmp_path / "no.svg"))

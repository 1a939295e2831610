"""Front extraction, hypervolume, anchors, and gain curves.

Oracles come first: a quadratic-time dominance filter and a strip-sweep area
integral, both written independently of the production code paths.
"""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fairfront.errors import AnchorError, ConfigError, GainUndefinedError
from fairfront.moo import (
    ANCHOR_PUSH_FRACTION,
    ANCHOR_PUSH_MIN,
    Anchors,
    Front,
    ObjectivePoint,
    anchors,
    fairness_gain,
    hypervolume,
    nhv,
    pareto_front,
)


def pts(*pairs):
    return [ObjectivePoint(x=float(a), y=float(b), policy_id="p%d" % i) for i, (a, b) in enumerate(pairs)]


def oracle_pareto(pairs):
    """Brute-force non-dominated set in (max x, min y), duplicates collapsed."""
    uniq = sorted(set((float(a), float(b)) for a, b in pairs))
    keep = set()
    for px, py in uniq:
        dominated = False
        for qx, qy in uniq:
            if qx >= px and qy <= py and (qx > px or qy < py):
                dominated = True
                break
        if not dominated:
            keep.add((px, py))
    return keep


def oracle_hv(pairs, ref):
    """Strip sweep: area of the union of rectangles [r_x, x_i] x [y_i, r_y].

    For x in (c_j, c_{j+1}] the dominated height is r_y minus the lowest y among
    points at or beyond c_{j+1}. Exact for arbitrary point sets.
    """
    r_x, r_y = ref
    xs = np.array([p[0] for p in pairs], dtype=np.float64)
    ys = np.array([p[1] for p in pairs], dtype=np.float64)
    cuts = np.concatenate(([r_x], np.unique(xs)))
    area = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        covered = xs >= b
        if not covered.any():
            continue
        height = r_y - float(np.min(ys[covered]))
        area += (b - a) * max(height, 0.0)
    return area


finite = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False, allow_infinity=False)
clouds = st.lists(st.tuples(finite, finite), min_size=1, max_size=40)


# -- pareto_front -----------------------------------------------------------


def test_pareto_drops_dominated_point():
    front = pareto_front(pts((3, 4), (2, 3), (1, 5)))
    assert set(zip(front.xs, front.ys)) == {(3.0, 4.0), (2.0, 3.0)}


def test_pareto_collapses_exact_duplicates():
    front = pareto_front(pts((2, 3), (2, 3)))
    assert len(front) == 1
    assert front.points[0].x == 2.0 and front.points[0].y == 3.0


def test_pareto_equal_performance_keeps_fairest():
    front = pareto_front(pts((2, 3), (2, 1), (2, 7)))
    assert set(zip(front.xs, front.ys)) == {(2.0, 1.0)}


def test_pareto_empty_input_rejected():
    with pytest.raises(ConfigError):
        pareto_front([])


def test_pareto_keeps_metadata():
    front = pareto_front(pts((1, 1)), space="predictive", justice="rawlsian", class_scope="det.shared")
    assert front.space == "predictive"
    assert front.justice == "rawlsian"
    assert front.class_scope == "det.shared"


@given(clouds)
def test_pareto_matches_bruteforce_oracle(pairs):
    front = pareto_front(pts(*pairs))
    assert set(zip(front.xs, front.ys)) == oracle_pareto(pairs)


@given(clouds)
def test_pareto_output_is_strictly_ordered(pairs):
    front = pareto_front(pts(*pairs))
    xs, ys = front.xs, front.ys
    assert np.all(np.diff(xs) < 0) or len(front) == 1
    assert np.all(np.diff(ys) < 0) or len(front) == 1


@given(clouds)
def test_pareto_is_idempotent(pairs):
    once = pareto_front(pts(*pairs))
    twice = pareto_front(once.points)
    assert list(zip(once.xs, once.ys)) == list(zip(twice.xs, twice.ys))


# -- hypervolume ------------------------------------------------------------


def test_hv_single_point_rectangle():
    front = pareto_front(pts((3, 1)))
    assert hypervolume(front, (0.0, 5.0)) == pytest.approx(12.0, abs=0.0)


def test_hv_two_point_staircase():
    front = pareto_front(pts((3, 4), (2, 3)))
    assert hypervolume(front, (0.0, 5.0)) == pytest.approx(5.0, abs=0.0)


def test_hv_point_on_reference_contributes_zero():
    front = pareto_front(pts((0, 5)))
    assert hypervolume(front, (0.0, 5.0)) == 0.0


def test_hv_reference_dominating_a_point_rejected():
    front = pareto_front(pts((3, 4), (2, 3)))
    with pytest.raises(AnchorError):
        hypervolume(front, (2.5, 5.0))
    with pytest.raises(AnchorError):
        hypervolume(front, (0.0, 3.5))


def test_hv_empty_front_is_zero():
    empty = Front(points=())
    assert hypervolume(empty, (0.0, 1.0)) == 0.0


@given(clouds)
def test_hv_matches_strip_sweep_oracle(pairs):
    front = pareto_front(pts(*pairs))
    xs = [p[0] for p in pairs]
    ys = [p[1] for p in pairs]
    ref = (min(xs) - 1.0, max(ys) + 1.0)
    got = hypervolume(front, ref)
    want = oracle_hv(pairs, ref)
    assert got == pytest.approx(want, rel=1e-12, abs=1e-12)


@given(clouds, st.tuples(finite, finite))
def test_hv_monotone_under_added_point(pairs, extra):
    xs = [p[0] for p in pairs]
    ys = [p[1] for p in pairs]
    ref = (min(xs + [extra[0]]) - 1.0, max(ys + [extra[1]]) + 1.0)
    base = hypervolume(pareto_front(pts(*pairs)), ref)
    grown = hypervolume(pareto_front(pts(*pairs, extra)), ref)
    assert grown >= base - 1e-12


def test_hv_random_fronts_against_grid_sampling():
    # midpoint sampling as a slow second opinion on a couple of fixed clouds
    rng = np.random.default_rng(7)
    for _ in range(3):
        pairs = [(float(a), float(b)) for a, b in rng.uniform(0.0, 1.0, size=(12, 2))]
        ref = (-0.1, 1.1)
        front = pareto_front(pts(*pairs))
        m = 2001
        gx = np.linspace(ref[0], 1.0, m)
        heights = np.zeros(m)
        for px, py in pairs:
            inside = gx <= px
            heights[inside] = np.maximum(heights[inside], ref[1] - py)
        approx = float(np.trapezoid(heights, gx))
        assert hypervolume(front, ref) == pytest.approx(approx, abs=5e-3)


# -- anchors ----------------------------------------------------------------


def test_anchors_over_union_with_one_percent_push():
    f1 = pareto_front(pts((10, 0), (4, 1)))
    f2 = pareto_front(pts((0, 2)))
    a = anchors([f1, f2])
    assert a.utopia == (10.0, 0.0)
    assert a.nadir == (0.0, 2.0)
    assert a.reference[0] == pytest.approx(-0.1, abs=0.0)
    assert a.reference[1] == pytest.approx(2.02, abs=0.0)


def test_anchors_single_point_uses_minimum_push():
    a = anchors([pareto_front(pts((2, 3)))])
    assert a.utopia == (2.0, 3.0)
    assert a.nadir == (2.0, 3.0)
    assert a.reference == (2.0 - ANCHOR_PUSH_MIN, 3.0 + ANCHOR_PUSH_MIN)


def test_anchors_empty_union_rejected():
    with pytest.raises(ConfigError):
        anchors([Front(points=())])


def test_anchors_roundtrip_dict():
    a = anchors([pareto_front(pts((1, 1), (0, 2)))])
    assert Anchors.from_dict(a.to_dict()) == a


@given(clouds)
def test_anchors_reference_weakly_worse_than_every_point(pairs):
    front = pareto_front(pts(*pairs))
    a = anchors([front])
    r_x, r_y = a.reference
    lo_x, hi_x = float(np.min(front.xs)), float(np.max(front.xs))
    lo_y, hi_y = float(np.min(front.ys)), float(np.max(front.ys))
    assert r_x <= lo_x - ANCHOR_PUSH_MIN * 0.5
    assert r_y >= hi_y + ANCHOR_PUSH_MIN * 0.5
    assert lo_x - r_x == pytest.approx(max(ANCHOR_PUSH_FRACTION * (hi_x - lo_x), ANCHOR_PUSH_MIN))
    assert r_y - hi_y == pytest.approx(max(ANCHOR_PUSH_FRACTION * (hi_y - lo_y), ANCHOR_PUSH_MIN))


# -- normalized hypervolume -------------------------------------------------


def test_nhv_utopia_alone_is_one():
    # utopia (10, 0) assembled from two fronts, then scored on its own
    a = anchors([pareto_front(pts((10, 1), (4, 0.5))), pareto_front(pts((10, 0), (0, 2)))])
    solo = pareto_front(pts((10, 0)))
    assert nhv(solo, a) == pytest.approx(1.0, abs=0.0)


def test_nhv_nadir_alone_is_tiny():
    a = anchors([pareto_front(pts((10, 0), (4, 1))), pareto_front(pts((0, 2)))])
    solo = pareto_front(pts((0, 2)))
    # only the pushed margin strip survives
    assert 0.0 < nhv(solo, a) < 1e-3


def test_nhv_degenerate_anchor_rectangle_rejected():
    degenerate = Anchors(utopia=(1.0, 1.0), nadir=(1.0, 1.0), reference=(1.0, 1.0))
    with pytest.raises(AnchorError):
        nhv(pareto_front(pts((1, 1))), degenerate)


def test_nhv_front_outside_anchor_box_rejected():
    a = Anchors(utopia=(1.0, 0.0), nadir=(0.0, 1.0), reference=(-0.01, 1.01))
    with pytest.raises(AnchorError):
        nhv(pareto_front(pts((3.0, 0.0))), a)


@given(clouds)
def test_nhv_bounded_for_covered_fronts(pairs):
    front = pareto_front(pts(*pairs))
    a = anchors([front])
    value = nhv(front, a)
    assert 0.0 <= value <= 1.0


# -- fairness gain ----------------------------------------------------------


def test_gain_identical_fronts_is_zero():
    f = pareto_front(pts((3, 4), (2, 3), (1, 1)))
    curve, auc = fairness_gain(f, f)
    assert np.all(curve.delta == 0.0)
    assert auc == 0.0


def test_gain_constant_offset_has_rectangular_area():
    # front_b sits 0.5 lower in unfairness everywhere, so it gains +0.5
    f_hi = pareto_front(pts((3, 4), (2, 3), (1, 1)))
    f_lo = pareto_front(pts((3, 3.5), (2, 2.5), (1, 0.5)))
    curve, auc = fairness_gain(f_hi, f_lo)
    assert np.allclose(curve.delta, 0.5)
    assert auc == pytest.approx(0.5 * (3.0 - 1.0), rel=1e-12)


def test_gain_disjoint_ranges_rejected():
    left = pareto_front(pts((1, 1), (0, 0)))
    right = pareto_front(pts((5, 1), (4, 0)))
    with pytest.raises(GainUndefinedError):
        fairness_gain(left, right)


def test_gain_needs_two_nonempty_fronts():
    f = pareto_front(pts((1, 1)))
    with pytest.raises(ConfigError):
        fairness_gain(f, Front(points=()))
    with pytest.raises(ConfigError):
        fairness_gain(f, f, samples=1)


@given(clouds, clouds)
def test_gain_antisymmetric(pa, pb):
    fa = pareto_front(pts(*pa))
    fb = pareto_front(pts(*pb))
    lo = max(float(np.min(fa.xs)), float(np.min(fb.xs)))
    hi = min(float(np.max(fa.xs)), float(np.max(fb.xs)))
    if lo > hi:
        with pytest.raises(GainUndefinedError):
            fairness_gain(fa, fb)
        return
    _, ab = fairness_gain(fa, fb)
    _, ba = fairness_gain(fb, fa)
    assert ab == pytest.approx(-ba, abs=1e-9)

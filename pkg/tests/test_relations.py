import pytest
from hypothesis import given, strategies as st

from cpattern.errors import InvalidArgumentError
from cpattern.geometry import Interval, Polygon, rectangle
from cpattern.relations import (Allen, Thresholds, allen_classify, decode_inter_t, encode_inter_t, full_para,
                                interval_relation, para_o, part_per, per_o, sim_a)
from cpattern.scene import Building
from oracles import allen_table, allen_textbook

TH = Thresholds()


def bld(bid, poly):
    return Building(bid, 1, poly)


def test_allen_basic_cases():
    iv = Interval
    assert allen_classify(iv(0, 1), iv(2, 3)) == Allen.BEFORE
    assert allen_classify(iv(0, 2), iv(2, 3)) == Allen.MEETS
    assert allen_classify(iv(0, 2), iv(1, 3)) == Allen.OVERLAPS
    assert allen_classify(iv(1, 2), iv(0, 3)) == Allen.DURING
    assert allen_classify(iv(0, 3), iv(1, 2)) == Allen.CONTAINS
    assert allen_classify(iv(0, 3), iv(0, 3)) == Allen.EQUALS
    assert allen_classify(iv(3, 4), iv(0, 3)) == Allen.MET_BY


def test_allen_eps_turns_near_touch_into_meets():
    assert allen_classify(Interval(0, 1.99), Interval(2, 3), eps=0.02) == Allen.MEETS
    assert allen_classify(Interval(0, 1.99), Interval(2, 3), eps=0.0) == Allen.BEFORE


def test_converse():
    for a in Allen:
        assert a.converse.converse == a
    assert Allen.BEFORE.converse == Allen.AFTER
    assert Allen.EQUALS.converse == Allen.EQUALS


@given(st.tuples(st.integers(-8, 8), st.integers(0, 8)), st.tuples(st.integers(-8, 8), st.integers(0, 8)))
def test_allen_swap_gives_converse(a, b):
    ia, ib = Interval(a[0], a[0] + a[1]), Interval(b[0], b[0] + b[1])
    assert allen_classify(ib, ia) == allen_classify(ia, ib).converse


def test_allen_matches_textbook_for_proper_intervals():
    vals = [k / 4 for k in range(9)]
    for a1 in vals:
        for a2 in vals:
            for b1 in vals:
                for b2 in vals:
                    if a1 < a2 and b1 < b2:
                        hits = allen_textbook((a1, a2), (b1, b2))
                        assert hits == [allen_classify(Interval(a1, a2), Interval(b1, b2))]


def test_allen_table_row_examples():
    # the oracle itself, on hand-checked cases
    assert allen_table((0, 1), (0, 1)) == 7
    assert allen_table((0, 0.9), (0, 1), eps=0.2) == 7
    assert allen_table((0, 1), (1.1, 2), eps=0.2) == 2


def test_encode_decode():
    assert encode_inter_t(1, 1) == 1
    assert encode_inter_t(13, 13) == 169
    assert encode_inter_t(12, 3) == 146
    assert decode_inter_t(159) == (13, 3)
    for bad in [(0, 1), (1, 14)]:
        with pytest.raises(InvalidArgumentError):
            encode_inter_t(*bad)
    for bad in (0, 170):
        with pytest.raises(InvalidArgumentError):
            decode_inter_t(bad)


def test_sim_a_symmetric_examples():
    assert sim_a(100, 250, 2)
    assert sim_a(250, 100, 2)
    assert not sim_a(100, 301, 2)
    assert sim_a(100, 300, 2)


def test_orientation_predicates():
    assert para_o(1, 179, 15)
    assert para_o(10, 24, 15)
    assert not para_o(10, 26, 15)
    assert per_o(0, 90, 15)
    assert per_o(170, 85, 15)
    assert not per_o(0, 60, 15)


def test_thresholds_validated():
    with pytest.raises(InvalidArgumentError):
        Thresholds(delta1=0)
    with pytest.raises(InvalidArgumentError):
        Thresholds(delta3=50)


def test_wings_full_para_both_ways():
    w1 = bld("w1", Polygon(((-12, 8), (-8, 8), (-8, 20), (-12, 20))))
    w2 = bld("w2", Polygon(((8, 8), (12, 8), (12, 20), (8, 20))))
    for a, b in ((w1, w2), (w2, w1)):
        r = interval_relation(a, b, TH)
        assert r.j == Allen.EQUALS and r.i in (Allen.BEFORE, Allen.AFTER)
        assert r.face_r == pytest.approx(1)
        assert full_para(a, b, r, TH)


def test_middle_to_wing_part_per():
    m = bld("m", Polygon(((-10, -2), (10, -2), (10, 2), (-10, 2))))
    w = bld("w", Polygon(((8, 8), (12, 8), (12, 20), (8, 20))))
    r = interval_relation(m, w, TH)
    assert (r.i, r.j) == (Allen.BEFORE, Allen.OVERLAPS) or (r.i, r.j) == (Allen.AFTER, Allen.OVERLAPS)
    assert r.inter_t in {3, 159}
    assert part_per(m, w, r, TH)


def test_wing_in_middle_of_bar_is_not_part_per():
    m = bld("m", rectangle(0, 0, 20, 4))
    w = bld("w", rectangle(0, 10, 12, 4, 90))
    r = interval_relation(m, w, TH)
    assert r.j == Allen.CONTAINS
    assert not part_per(m, w, r, TH)


def test_mid_family_never_full_para():
    a = bld("a", rectangle(0, 0, 20, 4))
    b = bld("b", rectangle(5, 0.5, 20, 4))
    r = interval_relation(a, b, TH)
    assert r.i not in (1, 2, 12, 13)
    assert not full_para(a, b, r, TH)


def test_low_rectangularity_has_no_relation():
    ell = bld("l", Polygon(((0, 0), (10, 0), (10, 1), (1, 1), (1, 10), (0, 10))))
    r = bld("r", rectangle(20, 0, 10, 4))
    assert ell.srec < TH.srec_min
    assert interval_relation(ell, r, TH) is None
    assert interval_relation(r, ell, TH) is None
    assert not full_para(r, ell, None, TH)


@given(st.floats(0, 360), st.floats(-500, 500), st.floats(-500, 500))
def test_predicates_invariant_under_rigid_motion(angle, dx, dy):
    m = bld("m", rectangle(0, 0, 20, 4))
    w = bld("w", rectangle(10, 14, 12, 4, 90))
    m2 = bld("m", m.polygon.transformed(angle, dx, dy, about=(0, 0)))
    w2 = bld("w", w.polygon.transformed(angle, dx, dy, about=(0, 0)))
    r1, r2 = interval_relation(m, w, TH), interval_relation(m2, w2, TH)
    assert part_per(m, w, r1, TH) == part_per(m2, w2, r2, TH)
    assert r1.face_r == pytest.approx(r2.face_r, abs=1e-6)

import json

import pytest

from cpattern.crossscale import MatchType, classify_component, load_overrides, match_buildings, overlap_ratio
from cpattern.errors import LoadError
from cpattern.geometry import rectangle
from cpattern.scene import Building, MatchOverride


def b(bid, lod, *args):
    return Building(bid, lod, rectangle(*args))


def test_classify_component_coarse_side_first():
    assert classify_component(1, 1) == MatchType.ONE_TO_ONE
    assert classify_component(1, 3) == MatchType.ONE_TO_MANY
    assert classify_component(2, 1) == MatchType.MANY_TO_ONE
    assert classify_component(2, 2) == MatchType.MANY_TO_MANY
    assert classify_component(1, 0) == MatchType.ONE_TO_NONE
    assert classify_component(0, 1) == MatchType.NONE_TO_ONE
    with pytest.raises(ValueError):
        classify_component(0, 0)


def test_overlap_ratio_normalized_by_smaller():
    big, small = rectangle(0, 0, 10, 10), rectangle(0, 0, 2, 2)
    assert overlap_ratio(big, small) == pytest.approx(1.0)
    assert overlap_ratio(big, rectangle(20, 0, 2, 2)) == 0.0


def test_aggregation_is_one_to_many_and_orphan_detailed():
    coarse = [b("C", 2, 0, 0, 20, 10)]
    detailed = [b("d1", 1, -5, 0, 9, 9), b("d2", 1, 5, 0, 9, 9), b("lone", 1, 100, 0, 5, 5)]
    comps = match_buildings(coarse, detailed)
    types = {(tuple(sorted(c.coarse_ids)), tuple(sorted(c.detailed_ids))): c.match_t for c in comps}
    assert types[(("C",), ("d1", "d2"))] == MatchType.ONE_TO_MANY
    assert types[((), ("lone",))] == MatchType.NONE_TO_ONE


def test_split_is_many_to_one():
    coarse = [b("c1", 2, -5, 0, 9, 9), b("c2", 2, 5, 0, 9, 9)]
    detailed = [b("D", 1, 0, 0, 20, 10)]
    (comp,) = match_buildings(coarse, detailed)
    assert comp.match_t == MatchType.MANY_TO_ONE
    assert comp.pairs == frozenset({("c1", "D"), ("c2", "D")})


def test_below_threshold_is_unmatched():
    coarse = [b("c", 2, 0, 0, 10, 10)]
    detailed = [b("d", 1, 9, 0, 10, 10)]  # 10% overlap
    comps = match_buildings(coarse, detailed, overlap_min=0.3)
    assert {c.match_t for c in comps} == {MatchType.ONE_TO_NONE, MatchType.NONE_TO_ONE}


def test_overrides_add_and_remove():
    coarse = [b("c", 2, 0, 0, 10, 10)]
    detailed = [b("d", 1, 9, 0, 10, 10), b("e", 1, 0, 0, 4, 4)]
    comps = match_buildings(coarse, detailed, overrides=[MatchOverride("c", "d", "add"),
                                                        MatchOverride("c", "e", "remove")])
    got = {c.match_t: (c.coarse_ids, c.detailed_ids) for c in comps}
    assert got[MatchType.ONE_TO_ONE] == (frozenset({"c"}), frozenset({"d"}))
    assert got[MatchType.NONE_TO_ONE] == (frozenset(), frozenset({"e"}))


def test_same_id_on_both_sides_kept_apart():
    comps = match_buildings([b("x", 2, 0, 0, 10, 10)], [b("x", 1, 50, 0, 10, 10)])
    assert len(comps) == 2


def test_load_overrides(tmp_path):
    p = tmp_path / "o.json"
    p.write_text(json.dumps([{"coarse_id": "c", "detailed_id": 7, "action": "add"}]))
    assert load_overrides(p) == [MatchOverride("c", "7", "add")]
    p.write_text(json.dumps([{"coarse_id": "c", "detailed_id": 7, "action": "merge"}]))
    with pytest.raises(LoadError):
        load_overrides(p)

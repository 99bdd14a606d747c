import random

import pytest

from cpattern.errors import InputValidationError
from cpattern.fixtures import c_fixture, random_scene
from cpattern.geometry import rectangle
from cpattern.proximity import build_proximity_graph, densify
from cpattern.scene import Building, Road


def pair(gap=6.0):
    return [Building("a", 1, rectangle(0, 0, 20, 4)), Building("b", 1, rectangle(0, 4 + gap, 20, 4))]


def test_two_parallel_bars_are_proximate():
    g = build_proximity_graph(pair())
    assert g.edges == frozenset({("a", "b")})


def test_road_between_blocks_adjacency():
    road = Road(((-30.0, 5.0), (30.0, 5.0)))
    g = build_proximity_graph(pair(), [road])
    assert g.edges == frozenset()


def test_road_elsewhere_does_not_block():
    road = Road(((-30.0, 50.0), (30.0, 50.0)))
    assert build_proximity_graph(pair(), [road]).edges == frozenset({("a", "b")})


def test_c_fixture_fully_connected():
    g = build_proximity_graph(c_fixture())
    assert g.edges == frozenset({("M", "W1"), ("M", "W2"), ("W1", "W2")})


def test_shadowed_building_not_adjacent():
    bs = [Building("a", 1, rectangle(0, 0, 20, 4)), Building("b", 1, rectangle(0, 8, 40, 4)),
          Building("c", 1, rectangle(0, 16, 20, 4))]
    g = build_proximity_graph(bs)
    assert g.has_edge("a", "b") and g.has_edge("b", "c")
    assert not g.has_edge("a", "c")


def test_max_gap_filters_far_pairs():
    assert build_proximity_graph(pair(gap=30.0), max_gap=10.0).edges == frozenset()
    assert build_proximity_graph(pair(gap=6.0), max_gap=10.0).edges == frozenset({("a", "b")})


def test_overlapping_buildings_rejected():
    bs = [Building("a", 1, rectangle(0, 0, 10, 4)), Building("b", 1, rectangle(2, 0, 10, 4))]
    with pytest.raises(InputValidationError):
        build_proximity_graph(bs)


def test_mixed_lods_rejected():
    with pytest.raises(InputValidationError):
        build_proximity_graph([Building("a", 1, rectangle(0, 0, 10, 4)), Building("b", 2, rectangle(0, 9, 10, 4))])


def test_single_building_and_empty():
    assert build_proximity_graph([]).edges == frozenset()
    assert build_proximity_graph([Building("a", 1, rectangle(0, 0, 10, 4))]).nodes == ("a",)


def test_densify_caps_segment_length():
    pts = densify([(0, 0), (10, 0), (10, 3)], 2.0, closed=False)
    assert pts[0] == (0, 0) and pts[-1] == (10, 3)
    assert all(abs(a[0] - b[0]) + abs(a[1] - b[1]) <= 2.0 + 1e-9 for a, b in zip(pts, pts[1:]))


def test_graph_is_independent_of_input_order():
    rng = random.Random(5)
    bs = random_scene(rng, 40)
    shuffled = bs[:]
    random.Random(1).shuffle(shuffled)
    assert build_proximity_graph(bs).edges == build_proximity_graph(shuffled).edges

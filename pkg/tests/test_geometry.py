import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geocast.geometry import (
    Point,
    Quadrant,
    Rect,
    angle_ccw,
    bounding_rect,
    distance,
    left_hand_next,
    quadrant_of,
    rect_contains,
    right_hand_next,
    segment_intersection,
    segments_properly_intersect,
)

coord = st.floats(min_value=-100, max_value=100, allow_nan=False, allow_infinity=False)
points = st.tuples(coord, coord)


def test_distance_examples():
    assert distance((0, 0), (3, 4)) == 5
    assert distance((2, 7), (2, 7)) == 0
    assert distance((0, 0), (1, 1)) == pytest.approx(math.sqrt(2), abs=1e-12)


@given(points, points, points)
def test_distance_is_a_metric(p, q, r):
    assert distance(p, q) >= 0
    assert distance(p, q) == distance(q, p)
    assert distance(p, r) <= distance(p, q) + distance(q, r) + 1e-9


def test_angle_ccw():
    assert angle_ccw(0, math.pi / 2) == pytest.approx(math.pi / 2)
    assert angle_ccw(math.pi / 2, 0) == pytest.approx(3 * math.pi / 2)
    assert angle_ccw(1.234, 1.234) == 0
    assert 0 <= angle_ccw(0.0, -1e-18) < 2 * math.pi


def test_right_hand_examples():
    nbrs = [(0, 1), (-1, 0), (0, -1)]
    assert nbrs[right_hand_next((0, 0), (1, 0), nbrs)] == (0, 1)
    assert right_hand_next((0, 0), (1, 0), [(1, 0)]) == 0
    two = [(1, 0), (-1, 0)]
    assert two[right_hand_next((0, 0), (0, 1), two)] == (-1, 0)


def test_left_hand_examples():
    nbrs = [(0, 1), (-1, 0), (0, -1)]
    assert nbrs[left_hand_next((0, 0), (1, 0), nbrs)] == (0, -1)
    assert left_hand_next((0, 0), (1, 0), [(1, 0)]) == 0
    two = [(1, 0), (-1, 0)]
    assert two[left_hand_next((0, 0), (0, 1), two)] == (1, 0)


def test_incoming_neighbor_is_taken_last():
    nbrs = [(1, 0), (0, -1)]
    # from (1,0): CCW sweep meets (0,-1) at 3pi/2 before returning to (1,0) at 2pi
    assert right_hand_next((0, 0), (1, 0), nbrs) == 1


def test_colinear_tie_prefers_nearer_then_lower_id():
    nbrs = [(0, 2), (0, 1)]
    assert right_hand_next((0, 0), (1, 0), nbrs) == 1
    same = [(0, 1), (0, 1)]
    assert right_hand_next((0, 0), (1, 0), same, ids=[7, 3]) == 1


def test_hand_rules_reject_degenerate_input():
    with pytest.raises(ValueError):
        right_hand_next((0, 0), (0, 0), [(1, 0)])
    with pytest.raises(ValueError):
        right_hand_next((0, 0), (1, 0), [])


@settings(max_examples=200)
@given(points, points, st.lists(points, min_size=1, max_size=8))
def test_left_hand_mirrors_right_hand(at, frm, nbrs):
    if frm == at or at in nbrs:
        return
    flip = lambda p: (p[0], -p[1])  # noqa: E731
    assert left_hand_next(at, frm, nbrs) == right_hand_next(flip(at), flip(frm), [flip(p) for p in nbrs])


def test_quadrant_examples():
    assert quadrant_of((0, 0), (1, 1)) is Quadrant.NE
    assert quadrant_of((0, 0), (0, 1)) is Quadrant.NE
    assert quadrant_of((0, 0), (-1, 0)) is Quadrant.NW
    assert quadrant_of((0, 0), (0, -1)) is Quadrant.SW
    assert quadrant_of((0, 0), (1, 0)) is Quadrant.SE
    with pytest.raises(ValueError):
        quadrant_of((1, 1), (1, 1))


def test_quadrant_partition_on_random_points():
    import numpy as np

    rng = np.random.default_rng(5)
    center = (0.3, -0.2)
    counts = {q: 0 for q in Quadrant}
    for x, y in rng.uniform(-1, 1, size=(1000, 2)):
        counts[quadrant_of(center, (x, y))] += 1
    assert sum(counts.values()) == 1000
    assert all(c > 0 for c in counts.values())


def test_quadrant_ccw_ray_belongs_to_quadrant():
    for q in Quadrant:
        a = q.ccw_boundary
        p = (round(math.cos(a)), round(math.sin(a)))
        assert quadrant_of((0, 0), p) is q


def test_rect_contains_closed():
    r = Rect.from_bounds(0, 0, 2, 2)
    assert rect_contains(r, (1, 1))
    assert rect_contains(r, (2, 2))
    assert not rect_contains(r, (2.0001, 1))


def test_bounding_rect():
    r = Rect.from_bounds(2, 2, 4, 4)
    assert bounding_rect((0, 0), r) == Rect.from_bounds(0, 0, 4, 4)
    assert bounding_rect((3, 3), r) == r
    assert bounding_rect((5, 1), r) == Rect.from_bounds(2, 1, 5, 4)


def test_rect_rejects_inverted_bounds():
    with pytest.raises(ValueError):
        Rect.from_bounds(1, 0, 0, 1)


def test_segments_properly_intersect():
    assert segments_properly_intersect((0, 0), (2, 2), (0, 2), (2, 0))
    assert not segments_properly_intersect((0, 0), (1, 1), (1, 1), (2, 0))
    assert not segments_properly_intersect((0, 0), (1, 0), (0, 1), (1, 1))


def test_segment_intersection_point():
    assert segment_intersection((0, 0), (2, 2), (0, 2), (2, 0)) == Point(1, 1)
    assert segment_intersection((0, 0), (1, 0), (0, 1), (1, 1)) is None
    assert segment_intersection((0, 0), (1, 0), (2, -1), (2, 1)) is None

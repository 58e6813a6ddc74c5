import pytest

from geocast.geometry import Point, Rect, distance, rect_contains
from geocast.oracle import oracle_report
from geocast.planar import gabriel
from geocast.routing import (
    HopLimitExceeded,
    Mode,
    UnicastState,
    forward,
    greedy_next,
    route_to_region,
)
from geocast.topology import Topology, TopologyConfig, generate

# source at 0 sits in the mouth of a C; the region lies past the far side
C_SHAPE = [
    (0, 0),
    (-0.2, 0.8),
    (0.3, 1.6),
    (1.2, 1.9),
    (2.1, 1.9),
    (3.0, 1.5),
    (3.6, 0.8),
    (4, 0),
    (-0.2, -0.8),
    (0.3, -1.6),
    (1.2, -1.9),
    (2.1, -1.9),
]
C_REGION = Rect.from_bounds(3.5, -0.5, 4.5, 0.5)


def test_greedy_picks_closest_strictly_closer_neighbor():
    t = Topology.from_positions([(0, 0), (0.5, 0), (0, 0.9)])
    assert greedy_next(t, 0, Point(3, 0)) == 1


def test_greedy_dead_end():
    t = Topology.from_positions([(0, 0), (-1, 0)])
    assert greedy_next(t, 0, Point(3, 0)) is None


def test_greedy_tie_goes_to_lower_id():
    t = Topology.from_positions([(0, 0), (0.5, 0.5), (0.5, -0.5)])
    assert greedy_next(t, 0, Point(3, 0)) == 1


def test_source_inside_region():
    t = Topology.from_positions([(0, 0), (0.5, 0)])
    out = route_to_region(t, gabriel(t), 0, Rect.from_bounds(-1, -1, 1, 1))
    assert out.entry_node == 0 and out.path == [0]


def test_empty_region_returns_none():
    t = Topology.from_positions([(0, 0), (0.5, 0)])
    out = route_to_region(t, gabriel(t), 0, Rect.from_bounds(5, 5, 6, 6))
    assert out.entry_node is None


def test_path_graph_is_pure_greedy():
    t = Topology.from_positions([(0.9 * i, 0) for i in range(5)])
    out = route_to_region(t, gabriel(t), 0, Rect.from_bounds(3.5, -0.5, 4.0, 0.5))
    assert out.path == [0, 1, 2, 3, 4]
    assert out.entry_node == 4
    assert out.perimeter_hops == 0


def test_c_shaped_obstacle_needs_perimeter_mode():
    t = Topology.from_positions(C_SHAPE)
    assert greedy_next(t, 0, C_REGION.center) is None
    assert 7 in oracle_report(t, 0, C_REGION).reachable_region_nodes
    out = route_to_region(t, gabriel(t), 0, C_REGION)
    assert out.entry_node == 7
    assert out.perimeter_hops > 0
    assert out.path == [0, 1, 2, 3, 4, 5, 6, 7]


def test_perimeter_entry_state():
    t = Topology.from_positions(C_SHAPE)
    g = gabriel(t)
    nxt, state = forward(g, 0, None, UnicastState.toward(C_REGION.center))
    assert state.mode is Mode.PERIMETER
    assert state.perimeter_entry == t.positions[0]
    assert state.perimeter_entry_distance == pytest.approx(distance(t.positions[0], C_REGION.center))
    assert state.first_edge == (0, nxt)


def test_disconnected_region_is_unreachable():
    pts = [(0, 0), (0.8, 0), (0.4, 0.6), (10, 10), (10.5, 10)]
    t = Topology.from_positions(pts)
    out = route_to_region(t, gabriel(t), 0, Rect.from_bounds(9.5, 9.5, 11, 11))
    assert out.entry_node is None


def test_hop_limit_is_enforced():
    t = Topology.from_positions(C_SHAPE)
    with pytest.raises(HopLimitExceeded):
        route_to_region(t, gabriel(t), 0, C_REGION, hop_limit=3)


def _trace_route(t, g, source, region):
    """Replay route_to_region hop by hop: one (at, prev, state, next, new_state) per hop."""
    state = UnicastState.toward(region.center)
    at, prev = source, None
    steps = []
    for _ in range(4 * t.node_count):
        nxt, new = forward(g, at, prev, state)
        steps.append((at, prev, state, nxt, new))
        if nxt is None:
            break
        prev, at, state = at, nxt, new
        if rect_contains(region, t.positions[at]):
            break
    return steps


def test_route_matches_reachability_on_random_topologies():
    checked = 0
    for seed in range(150):
        t = generate(TopologyConfig(300, 6, seed=seed))
        g = gabriel(t)
        side = t.side_length / 5
        lo = t.side_length / 2 - side / 2
        region = Rect.from_bounds(lo, lo, lo + side, lo + side)
        report = oracle_report(t, seed % t.node_count, region)
        if not report.region_nodes:
            continue
        for source in (seed % t.node_count, (7 * seed + 3) % t.node_count):
            out = route_to_region(t, g, source, region)
            assert out.entry_node is not None
            assert out.entry_node in report.region_nodes
            checked += 1
    assert checked >= 250


def test_greedy_hops_strictly_decrease_and_states_never_repeat():
    for seed in range(40):
        t = generate(TopologyConfig(300, 6, seed=1000 + seed))
        g = gabriel(t)
        side = t.side_length / 5
        region = Rect.from_bounds(0, 0, side, side)
        if not any(rect_contains(region, p) for p in t.positions):
            continue
        source = t.node_count - 1
        seen = set()
        for at, prev, state, nxt, new in _trace_route(t, g, source, region):
            key = (at, prev, state.mode, state.first_edge)
            assert key not in seen
            seen.add(key)
            if nxt is not None and new.mode is Mode.GREEDY:
                dest = region.center
                assert distance(t.positions[nxt], dest) < distance(t.positions[at], dest)

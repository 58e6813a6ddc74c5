"""Greedy geographic forwarding with face-routing recovery toward a point.

The per-hop step (:func:`forward`) is what the simulator's protocol handlers
call; :func:`route_to_region` drives it hop by hop to produce a whole route.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Optional

from .geometry import Point, Rect, distance, rect_contains, segment_intersection
from .planar import PlanarGraph
from .topology import Topology


class HopLimitExceeded(RuntimeError):
    pass


class Mode(enum.Enum):
    GREEDY = "greedy"
    PERIMETER = "perimeter"


@dataclass(frozen=True)
class UnicastState:
    mode: Mode
    destination: Point
    perimeter_entry: Optional[Point] = None
    perimeter_entry_distance: float = 0.0
    first_edge: Optional[tuple[int, int]] = None
    # closest point to the destination where the current face crossed the entry->destination line
    current_face_crossing: Optional[Point] = None

    @classmethod
    def toward(cls, destination: Point) -> "UnicastState":
        return cls(Mode.GREEDY, destination)


@dataclass
class RouteOutcome:
    entry_node: Optional[int]
    path: list[int]
    perimeter_hops: int = 0


def greedy_next(t: Topology, at: int, dest: Point) -> Optional[int]:
    """Unit-disk neighbor closest to ``dest`` if it is strictly closer than ``at``."""
    pos = t.positions
    best = None
    best_d = distance(pos[at], dest)
    # adjacency is sorted, so the strict comparison keeps the lower id on ties
    for v in t.adjacency[at]:
        d = distance(pos[v], dest)
        if d < best_d:
            best, best_d = v, d
    return best


def _face_change(
    g: PlanarGraph, at: int, nxt: int, state: UnicastState
) -> tuple[int, UnicastState]:
    pos = g.topology.positions
    here = pos[at]
    dest = state.destination
    assert state.perimeter_entry is not None and state.current_face_crossing is not None
    crossing = state.current_face_crossing
    first_edge = state.first_edge
    while True:
        hit = segment_intersection(here, pos[nxt], state.perimeter_entry, dest)
        if hit is None or not distance(hit, dest) < distance(crossing, dest):
            break
        crossing = hit
        nxt = g.right_hand(at, pos[nxt])
        first_edge = (at, nxt)
    if crossing is state.current_face_crossing:
        return nxt, state
    return nxt, replace(state, current_face_crossing=crossing, first_edge=first_edge)


def forward(
    g: PlanarGraph, at: int, previous_hop: Optional[int], state: UnicastState
) -> tuple[Optional[int], UnicastState]:
    """One GPSR hop from ``at``.  Returns (next hop or None if undeliverable, new state)."""
    t = g.topology
    here = t.positions[at]
    dest = state.destination
    if state.mode is Mode.PERIMETER and distance(here, dest) < state.perimeter_entry_distance:
        state = UnicastState.toward(dest)
    if state.mode is Mode.GREEDY:
        nxt = greedy_next(t, at, dest)
        if nxt is not None:
            return nxt, state
        if (here.x, here.y) == (dest[0], dest[1]) or not g.neighbors(at):
            return None, state
        nxt = g.right_hand(at, dest)
        state = UnicastState(
            mode=Mode.PERIMETER,
            destination=dest,
            perimeter_entry=here,
            perimeter_entry_distance=distance(here, dest),
            first_edge=(at, nxt),
            current_face_crossing=here,
        )
        return nxt, state
    assert previous_hop is not None
    nxt = g.right_hand(at, t.positions[previous_hop])
    nxt, state = _face_change(g, at, nxt, state)
    if (at, nxt) == state.first_edge:
        # back on the first edge of this face with no progress: destination unreachable
        return None, state
    return nxt, state


def route_to_region(
    t: Topology, g: PlanarGraph, source: int, region: Rect, hop_limit: Optional[int] = None
) -> RouteOutcome:
    """Carry a packet from ``source`` toward the region center until it enters the region."""
    pos = t.positions
    if rect_contains(region, pos[source]):
        return RouteOutcome(source, [source])
    if not any(rect_contains(region, p) for p in pos):
        return RouteOutcome(None, [source])
    limit = 4 * t.node_count if hop_limit is None else hop_limit
    state = UnicastState.toward(region.center)
    path = [source]
    at, prev = source, None
    perimeter_hops = 0
    for _ in range(limit):
        nxt, state = forward(g, at, prev, state)
        if nxt is None:
            return RouteOutcome(None, path, perimeter_hops)
        if state.mode is Mode.PERIMETER:
            perimeter_hops += 1
        prev, at = at, nxt
        path.append(at)
        if rect_contains(region, pos[at]):
            return RouteOutcome(at, path, perimeter_hops)
    raise HopLimitExceeded(f"route from {source} exceeded {limit} hops")

"""Planar geometry primitives used by every other module.

Everything here works on plain ``(x, y)`` tuples so that hot loops in the
router and simulator do not pay for attribute lookups.  All comparisons are
exact double-precision comparisons; node positions are generated, never
measured, so no epsilon is applied.
"""
from __future__ import annotations

import enum
import math
from typing import NamedTuple, Optional, Sequence

TWO_PI = 2.0 * math.pi


class Point(NamedTuple):
    x: float
    y: float


class Rect(NamedTuple):
    """Closed axis-aligned rectangle."""

    min: Point
    max: Point

    @classmethod
    def from_bounds(cls, xmin: float, ymin: float, xmax: float, ymax: float) -> "Rect":
        if xmin > xmax or ymin > ymax:
            raise ValueError(f"degenerate rectangle bounds ({xmin}, {ymin}, {xmax}, {ymax})")
        return cls(Point(xmin, ymin), Point(xmax, ymax))

    @property
    def center(self) -> Point:
        return Point((self.min.x + self.max.x) / 2.0, (self.min.y + self.max.y) / 2.0)

    @property
    def width(self) -> float:
        return self.max.x - self.min.x

    @property
    def height(self) -> float:
        return self.max.y - self.min.y

    def as_list(self) -> list[float]:
        return [self.min.x, self.min.y, self.max.x, self.max.y]


class Quadrant(enum.Enum):
    """The four portions a node divides its radio range into.

    Boundaries are half-open so each axis ray belongs to exactly one quadrant:
    +y to NE, -x to NW, -y to SW and +x to SE.
    """

    NE = 0
    NW = 1
    SW = 2
    SE = 3

    @property
    def ccw_boundary(self) -> float:
        """Angle of the ray bounding the quadrant on its counterclockwise side.

        That ray always belongs to the quadrant itself.
        """
        return (self.value + 1) * (math.pi / 2.0) % TWO_PI

    @property
    def bisector(self) -> float:
        return self.value * (math.pi / 2.0) + math.pi / 4.0


def distance(p: Sequence[float], q: Sequence[float]) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def angle_of(origin: Sequence[float], target: Sequence[float]) -> float:
    """Direction from ``origin`` to ``target`` in radians, in (-pi, pi]."""
    return math.atan2(target[1] - origin[1], target[0] - origin[0])


def angle_ccw(from_dir: float, to_dir: float) -> float:
    """Counterclockwise sweep from ``from_dir`` to ``to_dir``, in [0, 2*pi)."""
    sweep = (to_dir - from_dir) % TWO_PI
    # float modulo can round a tiny negative difference up to exactly 2*pi
    return 0.0 if sweep >= TWO_PI else sweep


def _hand_next(
    at: Sequence[float],
    reference_dir: float,
    neighbors: Sequence[Sequence[float]],
    ids: Optional[Sequence[int]],
    clockwise: bool,
) -> int:
    if not neighbors:
        raise ValueError("right/left hand rule needs at least one neighbor")
    ax, ay = at[0], at[1]
    best = -1
    best_key: tuple[float, float, int] | None = None
    for i, q in enumerate(neighbors):
        a = math.atan2(q[1] - ay, q[0] - ax)
        if clockwise:
            sweep = (reference_dir - a) % TWO_PI
        else:
            sweep = (a - reference_dir) % TWO_PI
        if sweep == 0.0 or sweep >= TWO_PI:
            # the reference direction itself is only taken after a full turn
            sweep = TWO_PI
        key = (sweep, math.hypot(q[0] - ax, q[1] - ay), ids[i] if ids is not None else i)
        if best_key is None or key < best_key:
            best_key = key
            best = i
    return best


def right_hand_next(
    at: Sequence[float],
    incoming_from: Sequence[float],
    neighbors: Sequence[Sequence[float]],
    ids: Optional[Sequence[int]] = None,
) -> int:
    """Index of the first neighbor met sweeping counterclockwise from ``incoming_from``.

    A neighbor lying exactly on the incoming ray (typically the node the packet
    came from) is chosen only after a full 2*pi sweep.  Colinear candidates are
    ordered by distance, then by ``ids`` (or list position).
    """
    if incoming_from[0] == at[0] and incoming_from[1] == at[1]:
        raise ValueError("incoming_from must differ from at")
    return _hand_next(at, angle_of(at, incoming_from), neighbors, ids, clockwise=False)


def left_hand_next(
    at: Sequence[float],
    incoming_from: Sequence[float],
    neighbors: Sequence[Sequence[float]],
    ids: Optional[Sequence[int]] = None,
) -> int:
    """Clockwise mirror of :func:`right_hand_next`."""
    if incoming_from[0] == at[0] and incoming_from[1] == at[1]:
        raise ValueError("incoming_from must differ from at")
    return _hand_next(at, angle_of(at, incoming_from), neighbors, ids, clockwise=True)


def hand_next_from_direction(
    at: Sequence[float],
    direction: float,
    neighbors: Sequence[Sequence[float]],
    ids: Optional[Sequence[int]] = None,
    clockwise: bool = False,
) -> int:
    """Hand-rule selection starting from an explicit direction instead of a point."""
    return _hand_next(at, direction, neighbors, ids, clockwise)


def quadrant_of(center: Sequence[float], p: Sequence[float]) -> Quadrant:
    dx = p[0] - center[0]
    dy = p[1] - center[1]
    if dx == 0.0 and dy == 0.0:
        raise ValueError("point coincides with center; quadrant undefined")
    if dx >= 0.0 and dy > 0.0:
        return Quadrant.NE
    if dx < 0.0 and dy >= 0.0:
        return Quadrant.NW
    if dx <= 0.0 and dy < 0.0:
        return Quadrant.SW
    return Quadrant.SE


def rect_contains(r: Rect, p: Sequence[float]) -> bool:
    return r.min.x <= p[0] <= r.max.x and r.min.y <= p[1] <= r.max.y


def bounding_rect(p: Sequence[float], r: Rect) -> Rect:
    """Smallest axis-aligned rectangle containing both ``p`` and ``r``."""
    return Rect(
        Point(min(p[0], r.min.x), min(p[1], r.min.y)),
        Point(max(p[0], r.max.x), max(p[1], r.max.y)),
    )


def rects_intersect(a: Rect, b: Rect) -> bool:
    return a.min.x <= b.max.x and b.min.x <= a.max.x and a.min.y <= b.max.y and b.min.y <= a.max.y


def _orient(a: Sequence[float], b: Sequence[float], c: Sequence[float]) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def segments_properly_intersect(
    a1: Sequence[float], a2: Sequence[float], b1: Sequence[float], b2: Sequence[float]
) -> bool:
    """True iff the open segments cross at a single point interior to both."""
    d1 = _orient(b1, b2, a1)
    d2 = _orient(b1, b2, a2)
    d3 = _orient(a1, a2, b1)
    d4 = _orient(a1, a2, b2)
    return ((d1 > 0 > d2) or (d1 < 0 < d2)) and ((d3 > 0 > d4) or (d3 < 0 < d4))


def segment_intersection(
    a1: Sequence[float], a2: Sequence[float], b1: Sequence[float], b2: Sequence[float]
) -> Optional[Point]:
    """Intersection point of two closed segments, or None (parallel segments give None)."""
    rx, ry = a2[0] - a1[0], a2[1] - a1[1]
    sx, sy = b2[0] - b1[0], b2[1] - b1[1]
    denom = rx * sy - ry * sx
    if denom == 0.0:
        return None
    qpx, qpy = b1[0] - a1[0], b1[1] - a1[1]
    t = (qpx * sy - qpy * sx) / denom
    u = (qpx * ry - qpy * rx) / denom
    if 0.0 <= t <= 1.0 and 0.0 <= u <= 1.0:
        return Point(a1[0] + t * rx, a1[1] + t * ry)
    return None

"""Comparison geocast schemes: global flooding and the three restricted-flooding zones.

Every baseline forwards by local broadcast and a node transmits at most
once per geocast.  Flood, FRFZ and ARFZ decide on the first copy a node
receives; PCN keeps checking later copies until one satisfies its rule.
"""
from __future__ import annotations

from typing import NamedTuple, Optional

from .geometry import Point, Rect, bounding_rect, distance, rect_contains
from .protocols import RunContext


class BaselinePacket(NamedTuple):
    geocast_id: int
    region: Rect
    zone: Optional[Rect]
    previous_hop: int
    previous_hop_position: Point


class BaselineState:
    __slots__ = ("settled",)

    def __init__(self) -> None:
        # geocast ids this node has forwarded or permanently declined
        self.settled: set = set()


class _Baseline:
    name = "baseline"
    decide_on_first_copy = True

    def new_state(self) -> BaselineState:
        return BaselineState()

    def initial_zone(self, sender_position: Point, region: Rect) -> Optional[Rect]:
        return None

    def originate(self, node: int, state: BaselineState, run: RunContext) -> list:
        view = run.view
        pos = view.topology.positions[node]
        state.settled.add(run.geocast_id)
        pkt = BaselinePacket(run.geocast_id, view.region, self.initial_zone(pos, view.region), node, pos)
        return [(None, pkt)]

    def handle(self, node: int, pkt: BaselinePacket, state: BaselineState, run: RunContext) -> list:
        if pkt.geocast_id in state.settled:
            return []
        if self.decide_on_first_copy:
            state.settled.add(pkt.geocast_id)
        pos = run.view.topology.positions[node]
        if not self.should_forward(node, pos, pkt, run):
            return []
        state.settled.add(pkt.geocast_id)
        return [(None, pkt._replace(previous_hop=node, previous_hop_position=pos))]

    def should_forward(self, node: int, pos: Point, pkt: BaselinePacket, run: RunContext) -> bool:
        raise NotImplementedError


class GlobalFlood(_Baseline):
    name = "flood"

    def should_forward(self, node, pos, pkt, run):
        return True


class FRFZ(_Baseline):
    """Fixed zone: bounding box of the original sender and the region."""

    name = "frfz"

    def initial_zone(self, sender_position, region):
        return bounding_rect(sender_position, region)

    def should_forward(self, node, pos, pkt, run):
        return rect_contains(pkt.zone, pos)


class ARFZ(_Baseline):
    """Adaptive zone: bounding box of the hop we heard the packet from and the region."""

    name = "arfz"

    def should_forward(self, node, pos, pkt, run):
        return rect_contains(bounding_rect(pkt.previous_hop_position, pkt.region), pos)


class PCN(_Baseline):
    """Progressively closer nodes: forward if closer to the region center than the last hop.

    The test is relative to whichever neighbor a copy came from, so a node
    that heard the packet first from a closer neighbor can still forward a
    later copy from a farther one.
    """

    name = "pcn"
    decide_on_first_copy = False

    def should_forward(self, node, pos, pkt, run):
        if run.view.in_region[node]:
            return True
        c = run.view.center
        return distance(pos, c) < distance(pkt.previous_hop_position, c)

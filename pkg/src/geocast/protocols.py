"""Per-node geocast handlers for GFG, GFPG and GFPG*.

A handler is called by the simulator with the receiving node, the packet,
that node's protocol state and the run context.  It returns a list of
``(target, packet)`` pairs where ``target`` is a node id for a unicast
transmission or ``None`` for a local broadcast.  Handlers only mutate the
node state object they are given; the engine owns everything else.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .geometry import Point, Quadrant, Rect, quadrant_of, rect_contains
from .planar import PlanarGraph
from .routing import UnicastState, forward
from .topology import Topology

BORDER_TTL = 10


class PacketKind(enum.Enum):
    UNICAST = "unicast"
    FLOOD = "flood"
    PERIMETER = "perimeter"


class Hand(enum.Enum):
    RIGHT = "R"
    LEFT = "L"


class GeocastPacket(NamedTuple):
    geocast_id: int
    region: Rect
    kind: PacketKind
    previous_hop: int
    origin: int
    ttl: Optional[int] = None
    hand: Hand = Hand.RIGHT
    unicast_state: Optional[UnicastState] = None


@dataclass
class NodeProtocolState:
    flooded: set = field(default_factory=set)
    perimeter_seen: set = field(default_factory=set)


class RegionView:
    """Topology facts a node can compute locally for one geocast region.

    Border flags and empty quadrants depend only on the topology and the
    region, so the harness builds one view and reuses it for every sender.
    """

    def __init__(self, t: Topology, g: PlanarGraph, region: Rect):
        self.topology = t
        self.planar = g
        self.region = region
        self.center = region.center
        pos = t.positions
        self.in_region = [rect_contains(region, p) for p in pos]
        inr = self.in_region
        self.region_nodes = [i for i, flag in enumerate(inr) if flag]
        self.border = [inr[u] and any(not inr[v] for v in t.adjacency[u]) for u in range(t.node_count)]
        self._empty: dict[int, tuple[Quadrant, ...]] = {}

    def empty_quadrants(self, u: int) -> tuple[Quadrant, ...]:
        """Quadrants of u's radio range holding no unit-disk neighbor."""
        cached = self._empty.get(u)
        if cached is None:
            pos = self.topology.positions
            occupied = {quadrant_of(pos[u], pos[v]) for v in self.topology.adjacency[u]}
            cached = tuple(q for q in Quadrant if q not in occupied)
            self._empty[u] = cached
        return cached


class RunContext:
    """Mutable per-geocast bookkeeping shared between the engine and handlers."""

    def __init__(self, view: RegionView, geocast_id: int = 0):
        self.view = view
        self.geocast_id = geocast_id
        self.route_failed = False


def quadrant_beyond_boundary(position: Point, q: Quadrant, radio_range: float, bounds: Rect) -> bool:
    """True when the quadrant's bisector, one radio range out, leaves the network area."""
    b = q.bisector
    probe = (position[0] + radio_range * math.cos(b), position[1] + radio_range * math.sin(b))
    return not rect_contains(bounds, probe)


def apply_border_enhancements(
    node: int, quadrants: tuple[Quadrant, ...], view: RegionView
) -> list[tuple[Quadrant, Hand, int]]:
    """Perimeter emissions for empty quadrants under the border-region rules.

    Quadrants that open onto the outside of the network are dropped; every
    remaining quadrant gets a right-hand and a left-hand copy, each limited
    to ``BORDER_TTL`` hops.
    """
    t = view.topology
    out = []
    for q in quadrants:
        if quadrant_beyond_boundary(t.positions[node], q, t.radio_range, t.bounds):
            continue
        out.append((q, Hand.RIGHT, BORDER_TTL))
        out.append((q, Hand.LEFT, BORDER_TTL))
    return out


def _perimeter_step(g: PlanarGraph, node: int, packet: GeocastPacket) -> Optional[tuple[int, GeocastPacket]]:
    ttl = packet.ttl
    if ttl is not None:
        ttl -= 1
        if ttl <= 0:
            return None
    prev = g.topology.positions[packet.previous_hop]
    if packet.hand is Hand.RIGHT:
        nxt = g.right_hand(node, prev)
    else:
        nxt = g.left_hand(node, prev)
    return nxt, packet._replace(previous_hop=node, ttl=ttl)


class GFG:
    """Geographic forwarding to the region center, then flooding inside the region."""

    name = "gfg"

    def new_state(self) -> NodeProtocolState:
        return NodeProtocolState()

    def originate(self, node: int, state: NodeProtocolState, run: RunContext) -> list:
        view = run.view
        pkt = GeocastPacket(
            run.geocast_id,
            view.region,
            PacketKind.UNICAST,
            previous_hop=node,
            origin=node,
            unicast_state=UnicastState.toward(view.center),
        )
        if view.in_region[node]:
            return self.region_receive(node, pkt, state, run)
        return self._route(node, None, pkt, run)

    def handle(self, node: int, pkt: GeocastPacket, state: NodeProtocolState, run: RunContext) -> list:
        if run.view.in_region[node]:
            return self.region_receive(node, pkt, state, run)
        if pkt.kind is PacketKind.UNICAST:
            return self._route(node, pkt.previous_hop, pkt, run)
        if pkt.kind is PacketKind.PERIMETER:
            return self.outside_perimeter(node, pkt, state, run)
        return []  # region flood overheard outside the region

    def _route(self, node: int, prev: Optional[int], pkt: GeocastPacket, run: RunContext) -> list:
        assert pkt.unicast_state is not None
        nxt, ustate = forward(run.view.planar, node, prev, pkt.unicast_state)
        if nxt is None:
            run.route_failed = True
            return []
        return [(nxt, pkt._replace(previous_hop=node, unicast_state=ustate))]

    def _flood(self, node: int, pkt: GeocastPacket, state: NodeProtocolState) -> list:
        if pkt.geocast_id in state.flooded:
            return []
        state.flooded.add(pkt.geocast_id)
        flood = pkt._replace(kind=PacketKind.FLOOD, previous_hop=node, unicast_state=None, ttl=None)
        return [(None, flood)]

    def region_receive(self, node: int, pkt: GeocastPacket, state: NodeProtocolState, run: RunContext) -> list:
        return self._flood(node, pkt, state)

    def outside_perimeter(self, node: int, pkt: GeocastPacket, state: NodeProtocolState, run: RunContext) -> list:
        return []


class GFPG(GFG):
    """GFG plus face traversal out of every region border node: guaranteed delivery."""

    name = "gfpg"

    def region_receive(self, node: int, pkt: GeocastPacket, state: NodeProtocolState, run: RunContext) -> list:
        # a perimeter packet entering the region ends its traversal here
        out = self._flood(node, pkt, state)
        if not out:
            return out
        view = run.view
        if view.border[node]:
            inr = view.in_region
            seed = pkt._replace(
                kind=PacketKind.PERIMETER, previous_hop=node, origin=node, unicast_state=None, ttl=None
            )
            out.extend((v, seed) for v in view.planar.neighbors(node) if not inr[v])
        return out

    def outside_perimeter(self, node: int, pkt: GeocastPacket, state: NodeProtocolState, run: RunContext) -> list:
        if node == pkt.origin:
            return []
        step = _perimeter_step(run.view.planar, node, pkt)
        return [step] if step is not None else []


class GFPGStar(GFG):
    """Adaptive GFPG: only region nodes with an empty radio-range quadrant start face traversals."""

    name = "gfpg-star"

    def __init__(self, border_enhancements: bool = False):
        self.border_enhancements = border_enhancements

    @property
    def label(self) -> str:
        return self.name + ("+border" if self.border_enhancements else "")

    def quadrant_emissions(self, node: int, pkt: GeocastPacket, run: RunContext) -> list:
        view = run.view
        empty = view.empty_quadrants(node)
        if not empty:
            return []
        if self.border_enhancements:
            plan = apply_border_enhancements(node, empty, view)
        else:
            plan = [(q, Hand.RIGHT, None) for q in empty]
        g = view.planar
        out = []
        sent = set()
        for q, hand, ttl in plan:
            # sweep starts inside the empty quadrant; any interior direction gives the same neighbor
            nxt = g.hand_from_direction(node, q.bisector, clockwise=hand is Hand.LEFT)
            if (nxt, hand) in sent:
                continue
            sent.add((nxt, hand))
            out.append(
                (
                    nxt,
                    pkt._replace(
                        kind=PacketKind.PERIMETER,
                        previous_hop=node,
                        origin=node,
                        ttl=ttl,
                        hand=hand,
                        unicast_state=None,
                    ),
                )
            )
        return out

    def region_receive(self, node: int, pkt: GeocastPacket, state: NodeProtocolState, run: RunContext) -> list:
        out = []
        if pkt.kind is PacketKind.PERIMETER:
            out = self.outside_perimeter(node, pkt, state, run)
            if pkt.geocast_id in state.flooded:
                return out
        flood = self._flood(node, pkt, state)
        if flood:
            return flood + self.quadrant_emissions(node, pkt, run) + out
        return out

    def outside_perimeter(self, node: int, pkt: GeocastPacket, state: NodeProtocolState, run: RunContext) -> list:
        key = (pkt.geocast_id, pkt.previous_hop, pkt.hand)
        if key in state.perimeter_seen:
            return []
        state.perimeter_seen.add(key)
        step = _perimeter_step(run.view.planar, node, pkt)
        return [step] if step is not None else []


PROTOCOL_NAMES = ("flood", "frfz", "arfz", "pcn", "gfg", "gfpg", "gfpg-star")


def make_protocol(name: str, border_enhancements: bool = False):
    """Protocol handler by CLI name."""
    from . import baselines

    key = name.lower().replace("_", "-")
    if key in ("gfpg*", "gfpgstar"):
        key = "gfpg-star"
    table = {
        "flood": baselines.GlobalFlood,
        "frfz": baselines.FRFZ,
        "arfz": baselines.ARFZ,
        "pcn": baselines.PCN,
        "gfg": GFG,
        "gfpg": GFPG,
    }
    if key == "gfpg-star":
        return GFPGStar(border_enhancements=border_enhancements)
    if key not in table:
        raise ValueError(f"unknown protocol {name!r}; expected one of {', '.join(PROTOCOL_NAMES)}")
    return table[key]()

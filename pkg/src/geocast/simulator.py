"""Deterministic discrete-event engine running one geocast to quiescence.

Every transmission is delivered one tick later, in emission order; there
are no losses or collisions.  A broadcast reaches every unit-disk neighbor
of the transmitting node, a unicast reaches only its addressee.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Any, Callable, NamedTuple, Optional

from .geometry import Rect
from .planar import PlanarGraph
from .protocols import PacketKind, RegionView, RunContext
from .topology import Topology, nodes_in_region


class NonTermination(RuntimeError):
    pass


class EmptyRegion(ValueError):
    pass


class Event(NamedTuple):
    deliver_time: int
    sequence: int
    target: int
    packet: Any


@dataclass(frozen=True)
class GeocastResult:
    delivered_region_nodes: frozenset
    forwarding_nodes: frozenset
    total_transmissions: int
    unicast_path_length: int
    terminated_normally: bool
    region_size: int = 0

    def to_dict(self) -> dict:
        return {
            "delivered_region_nodes": sorted(self.delivered_region_nodes),
            "forwarding_nodes": sorted(self.forwarding_nodes),
            "total_transmissions": self.total_transmissions,
            "unicast_path_length": self.unicast_path_length,
            "terminated_normally": self.terminated_normally,
            "region_size": self.region_size,
        }


def _describe(packet: Any) -> str:
    kind = getattr(packet, "kind", None)
    if kind is None:
        return "flood"
    label = kind.value
    if kind is PacketKind.PERIMETER:
        label += f"/{packet.hand.value}"
        if packet.ttl is not None:
            label += f" ttl={packet.ttl}"
    elif kind is PacketKind.UNICAST and packet.unicast_state is not None:
        label += f"/{packet.unicast_state.mode.value}"
    return label


def run_geocast(
    t: Topology,
    g: PlanarGraph,
    protocol: Any,
    sender: int,
    region: Rect,
    view: Optional[RegionView] = None,
    geocast_id: int = 0,
    trace: Optional[Callable[[str], None]] = None,
    event_bound: Optional[int] = None,
) -> GeocastResult:
    """Execute ``protocol`` from ``sender`` until no packet is in flight."""
    if view is None:
        view = RegionView(t, g, region)
    n = t.node_count
    bound = 64 * n * n if event_bound is None else event_bound
    run = RunContext(view, geocast_id)
    states: list = [None] * n
    reached = bytearray(n)
    reached[sender] = 1
    adjacency = t.adjacency
    queue: deque = deque()
    forwarders: set = set()
    tx = 0
    unicast_hops = 0
    seq = 0

    def emit(node: int, out: list, now: int) -> None:
        nonlocal tx, unicast_hops, seq
        for target, pkt in out:
            tx += 1
            forwarders.add(node)
            if getattr(pkt, "kind", None) is PacketKind.UNICAST:
                unicast_hops += 1
            if target is None:
                for v in adjacency[node]:
                    queue.append(Event(now + 1, seq, v, pkt))
                    seq += 1
            else:
                queue.append(Event(now + 1, seq, target, pkt))
                seq += 1
            if trace is not None:
                dest = "*" if target is None else str(target)
                trace(f"t={now} node={node} send {_describe(pkt)} -> {dest}")

    state = states[sender] = protocol.new_state()
    emit(sender, protocol.originate(sender, state, run), 0)
    processed = 0
    handle = protocol.handle
    new_state = protocol.new_state
    while queue:
        ev = queue.popleft()
        processed += 1
        if processed > bound:
            raise NonTermination(f"{protocol.name}: more than {bound} events")
        node = ev.target
        reached[node] = 1
        state = states[node]
        if state is None:
            state = states[node] = new_state()
        out = handle(node, ev.packet, state, run)
        if trace is not None and not out:
            trace(f"t={ev.deliver_time} node={node} recv {_describe(ev.packet)} from {ev.packet.previous_hop}: drop")
        if out:
            emit(node, out, ev.deliver_time)
    delivered = frozenset(u for u in view.region_nodes if reached[u])
    return GeocastResult(
        delivered_region_nodes=delivered,
        forwarding_nodes=frozenset(forwarders),
        total_transmissions=tx,
        unicast_path_length=unicast_hops,
        terminated_normally=not run.route_failed,
        region_size=len(view.region_nodes),
    )


def overhead(result: GeocastResult) -> int:
    """Number of distinct nodes that transmitted the geocast at least once."""
    return len(result.forwarding_nodes)


def delivery_rate(result: GeocastResult, t: Topology, region: Rect) -> float:
    members = nodes_in_region(t, region)
    if not members:
        raise EmptyRegion("geocast region contains no nodes")
    return len(result.delivered_region_nodes & members) / len(members)

"""Brute-force ground truth for delivery checks.

Nothing here imports the routing, planarization or protocol code: the
oracle walks raw positions and unit-disk adjacency with its own BFS so a
bug in the traversal code cannot hide on both sides of a comparison.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional

from .geometry import Rect
from .topology import Topology


@dataclass(frozen=True)
class OracleReport:
    reachable_region_nodes: frozenset
    region_subgraph_connected: bool
    gap_present: bool
    region_nodes: frozenset = frozenset()


@dataclass(frozen=True)
class Verdict:
    passed: bool
    missed: frozenset = frozenset()
    seed: Optional[int] = None
    extra: frozenset = field(default=frozenset())

    def __bool__(self) -> bool:
        return self.passed

    def __str__(self) -> str:
        if self.passed:
            return "PASS"
        return f"FAIL missed={sorted(self.missed)} seed={self.seed}"


def _inside(r: Rect, p) -> bool:
    return r.min.x <= p[0] <= r.max.x and r.min.y <= p[1] <= r.max.y


def _bfs(adjacency, start: int, allowed: Optional[set] = None) -> set:
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for u in frontier:
            for v in adjacency[u]:
                if v in seen or (allowed is not None and v not in allowed):
                    continue
                seen.add(v)
                nxt.append(v)
        frontier = nxt
    return seen


def oracle_report(t: Topology, sender: int, region: Rect) -> OracleReport:
    members = {i for i, p in enumerate(t.positions) if _inside(region, p)}
    reachable = _bfs(t.adjacency, sender)
    if members:
        start = min(members)
        region_connected = _bfs(t.adjacency, start, allowed=members) == members
    else:
        region_connected = True
    reach_region = frozenset(members & reachable)
    gap = (not region_connected) and reach_region == members
    return OracleReport(reach_region, region_connected, gap, frozenset(members))


def check_guarantee(result, report: OracleReport, seed: Optional[int] = None) -> Verdict:
    """PASS iff the protocol reached exactly the region nodes reachable from the sender."""
    delivered = frozenset(result.delivered_region_nodes)
    missed = report.reachable_region_nodes - delivered
    extra = delivered - report.reachable_region_nodes
    return Verdict(not missed and not extra, frozenset(missed), seed, frozenset(extra))


def dump_counterexample(
    directory: str,
    t: Topology,
    sender: int,
    region: Rect,
    protocol: str,
    verdict: Verdict,
    planar=None,
) -> str:
    """Write a failing case as JSON so it can be replayed as a fixture."""
    os.makedirs(directory, exist_ok=True)
    name = f"counterexample_{protocol}_seed{t.seed}_attempt{t.attempt}_sender{sender}.json"
    path = os.path.join(directory, name)
    doc = {
        "protocol": protocol,
        "sender": sender,
        "region": region.as_list(),
        "missed": sorted(verdict.missed),
        "topology": t.to_dict(planar),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
    return path

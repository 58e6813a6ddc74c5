"""Gabriel graph and relative neighborhood graph extraction, plus face enumeration."""
from __future__ import annotations

from typing import Iterator, Sequence

import numpy as np

from .geometry import hand_next_from_direction, left_hand_next, right_hand_next
from .topology import Topology


class PlanarGraph:
    """Symmetric subgraph of a topology's unit-disk graph used for face routing."""

    def __init__(self, topology: Topology, adjacency: Sequence[Sequence[int]], kind: str = "gabriel"):
        self.topology = topology
        self.kind = kind
        self.adjacency: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(a)) for a in adjacency)
        pos = topology.positions
        self._nbr_pos = tuple(tuple(pos[v] for v in a) for a in self.adjacency)

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self.adjacency[u]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, a in enumerate(self.adjacency) for v in a if u < v]

    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def right_hand(self, at: int, incoming_from: Sequence[float]) -> int:
        """Planar neighbor of ``at`` first counterclockwise from the point ``incoming_from``."""
        nbrs = self.adjacency[at]
        i = right_hand_next(self.topology.positions[at], incoming_from, self._nbr_pos[at], nbrs)
        return nbrs[i]

    def left_hand(self, at: int, incoming_from: Sequence[float]) -> int:
        nbrs = self.adjacency[at]
        i = left_hand_next(self.topology.positions[at], incoming_from, self._nbr_pos[at], nbrs)
        return nbrs[i]

    def hand_from_direction(self, at: int, direction: float, clockwise: bool = False) -> int:
        nbrs = self.adjacency[at]
        i = hand_next_from_direction(
            self.topology.positions[at], direction, self._nbr_pos[at], nbrs, clockwise
        )
        return nbrs[i]


def _witness_filter(t: Topology, rule: str) -> list[list[int]]:
    coords = t.coords
    kept: list[list[int]] = [[] for _ in range(t.node_count)]
    for u, nbrs in enumerate(t.adjacency):
        if not nbrs:
            continue
        idx = np.asarray(nbrs)
        pu = coords[u]
        pn = coords[idx]
        if rule == "gabriel":
            mid = (pu + pn) / 2.0
            half = np.hypot(*(pn - pu).T) / 2.0
            # d[j, w]: distance from witness w to the midpoint of edge (u, nbrs[j])
            d = np.hypot(pn[None, :, 0] - mid[:, None, 0], pn[None, :, 1] - mid[:, None, 1])
            inside = d < half[:, None]
        else:
            duv = np.hypot(*(pn - pu).T)
            dwu = duv[None, :]
            dwv = np.hypot(pn[None, :, 0] - pn[:, None, 0], pn[None, :, 1] - pn[:, None, 1])
            inside = np.maximum(dwu, dwv) < duv[:, None]
        np.fill_diagonal(inside, False)
        killed = inside.any(axis=1)
        for j, v in enumerate(nbrs):
            # decide each undirected edge once, at its lower endpoint, so the result is symmetric
            if u < v and not killed[j]:
                kept[u].append(v)
                kept[v].append(u)
    return kept


def gabriel(t: Topology) -> PlanarGraph:
    """Keep (u, v) unless some other node lies strictly inside the circle with diameter uv."""
    return PlanarGraph(t, _witness_filter(t, "gabriel"), "gabriel")


def rng(t: Topology) -> PlanarGraph:
    """Keep (u, v) unless some w is strictly closer to both u and v than they are to each other."""
    return PlanarGraph(t, _witness_filter(t, "rng"), "rng")


def _next_dart(g: PlanarGraph, u: int, v: int) -> tuple[int, int]:
    return v, g.right_hand(v, g.topology.positions[u])


def iter_face(g: PlanarGraph, u: int, v: int) -> Iterator[tuple[int, int]]:
    """Directed edges of the face containing (u, v), starting with (u, v)."""
    start = (u, v)
    dart = start
    while True:
        yield dart
        dart = _next_dart(g, *dart)
        if dart == start:
            return


def faces(g: PlanarGraph) -> list[list[tuple[int, int]]]:
    """Partition every directed planar edge into right-hand-rule cycles."""
    seen: set[tuple[int, int]] = set()
    cycles: list[list[tuple[int, int]]] = []
    for u, nbrs in enumerate(g.adjacency):
        for v in nbrs:
            if (u, v) in seen:
                continue
            cycle = []
            for dart in iter_face(g, u, v):
                if dart in seen:
                    raise RuntimeError(f"directed edge {dart} reached by two faces; graph not planar")
                seen.add(dart)
                cycle.append(dart)
            cycles.append(cycle)
    return cycles

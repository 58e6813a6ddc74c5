"""Random connected unit-disk topologies at a target density."""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .geometry import Point, Rect, rect_contains

# Recorded in every serialized topology and result file.
GENERATOR_NAME = "numpy.random.PCG64 seeded by SeedSequence(entropy=seed, spawn_key=...)"


class ConnectivityUnreachable(RuntimeError):
    """No connected topology was drawn within ``max_regen_attempts``."""


@dataclass(frozen=True)
class TopologyConfig:
    node_count: int
    target_density: float
    radio_range: float = 1.0
    seed: int = 0
    max_regen_attempts: int = 1000
    # "reject": redraw the whole placement until connected.
    # "repair": keep the largest component and redraw only the stranded nodes.
    connectivity: str = "repair"

    def __post_init__(self) -> None:
        if self.connectivity not in ("reject", "repair"):
            raise ValueError(f"unknown connectivity strategy {self.connectivity!r}")
        if self.node_count < 2:
            raise ValueError("node_count must be >= 2")
        if not self.target_density > 0:
            raise ValueError("target_density must be positive")
        if not self.radio_range > 0:
            raise ValueError("radio_range must be positive")
        if self.max_regen_attempts < 1:
            raise ValueError("max_regen_attempts must be >= 1")


@dataclass(frozen=True, eq=False)
class Topology:
    positions: tuple[Point, ...]
    side_length: float
    radio_range: float
    adjacency: tuple[tuple[int, ...], ...]
    seed: Optional[int] = None
    attempt: int = 0
    _coords: np.ndarray = field(repr=False, default=None)  # type: ignore[assignment]

    @property
    def node_count(self) -> int:
        return len(self.positions)

    @property
    def bounds(self) -> Rect:
        return Rect(Point(0.0, 0.0), Point(self.side_length, self.side_length))

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    def mean_degree(self) -> float:
        return sum(len(a) for a in self.adjacency) / self.node_count

    @classmethod
    def from_positions(
        cls,
        positions: Iterable[Sequence[float]],
        radio_range: float = 1.0,
        side_length: Optional[float] = None,
        seed: Optional[int] = None,
        attempt: int = 0,
    ) -> "Topology":
        coords = np.asarray([[float(p[0]), float(p[1])] for p in positions], dtype=float)
        if coords.ndim != 2 or coords.shape[1] != 2 or len(coords) == 0:
            raise ValueError("positions must be a non-empty sequence of (x, y) pairs")
        if not np.all(np.isfinite(coords)):
            raise ValueError("positions must be finite")
        if side_length is None:
            side_length = float(max(coords.max(), 0.0))
        adjacency = unit_disk_adjacency(coords, radio_range)
        return cls(
            positions=tuple(Point(float(x), float(y)) for x, y in coords),
            side_length=float(side_length),
            radio_range=float(radio_range),
            adjacency=adjacency,
            seed=seed,
            attempt=attempt,
            _coords=coords,
        )

    def to_dict(self, planar: Any = None) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "node_count": self.node_count,
            "side_length": self.side_length,
            "radio_range": self.radio_range,
            "seed": self.seed,
            "attempt": self.attempt,
            "generator": GENERATOR_NAME,
            "positions": [[p.x, p.y] for p in self.positions],
        }
        if planar is not None:
            doc["planar_edges"] = [list(e) for e in planar.edges()]
        return doc

    def to_json(self, planar: Any = None) -> str:
        return json.dumps(self.to_dict(planar), indent=None, separators=(",", ":"))

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "Topology":
        return cls.from_positions(
            doc["positions"],
            radio_range=doc["radio_range"],
            side_length=doc["side_length"],
            seed=doc.get("seed"),
            attempt=doc.get("attempt", 0),
        )

    @classmethod
    def from_json(cls, text: str) -> "Topology":
        return cls.from_dict(json.loads(text))


def unit_disk_adjacency(coords: np.ndarray, radio_range: float) -> tuple[tuple[int, ...], ...]:
    """Sorted neighbor lists: u ~ v iff 0 < |uv| <= radio_range."""
    n = len(coords)
    nbrs: list[list[int]] = [[] for _ in range(n)]
    if n > 1:
        pairs = cKDTree(coords).query_pairs(radio_range, output_type="ndarray")
        for u, v in pairs.tolist():
            if coords[u, 0] == coords[v, 0] and coords[u, 1] == coords[v, 1]:
                continue
            nbrs[u].append(v)
            nbrs[v].append(u)
    return tuple(tuple(sorted(a)) for a in nbrs)


def side_length_for_density(node_count: int, target_density: float, radio_range: float = 1.0) -> float:
    """Square side giving ``target_density`` expected neighbors per node, edge effects ignored."""
    if node_count < 2 or target_density <= 0 or radio_range <= 0:
        raise ValueError("node_count >= 2 and positive density/range required")
    return math.sqrt((node_count - 1) * math.pi * radio_range**2 / target_density)


def rng_for(seed: int, *keys: int) -> np.random.Generator:
    """Portable, named generator for a seed plus optional sub-stream keys."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=tuple(keys))))


def generate(config: TopologyConfig) -> Topology:
    """Draw uniform placements until the unit-disk graph is connected.

    With ``connectivity="reject"`` every attempt is an independent placement
    drawn from sub-seed ``attempt``.  Plain rejection is hopeless for sparse
    large networks (n=1000 at density 6 essentially never comes out
    connected), so the default ``"repair"`` strategy keeps the largest
    component and redraws the remaining nodes uniformly, one round per attempt.
    """
    side = side_length_for_density(config.node_count, config.target_density, config.radio_range)
    if config.connectivity == "repair":
        return _generate_repair(config, side)
    for attempt in range(config.max_regen_attempts):
        rng = rng_for(config.seed, attempt)
        coords = rng.uniform(0.0, side, size=(config.node_count, 2))
        topo = Topology.from_positions(
            coords, config.radio_range, side_length=side, seed=config.seed, attempt=attempt
        )
        if is_connected(topo):
            return topo
    raise ConnectivityUnreachable(
        f"no connected topology after {config.max_regen_attempts} attempts "
        f"(n={config.node_count}, density={config.target_density})"
    )


def _generate_repair(config: TopologyConfig, side: float) -> Topology:
    rng = rng_for(config.seed, 0)
    coords = rng.uniform(0.0, side, size=(config.node_count, 2))
    for attempt in range(config.max_regen_attempts):
        topo = Topology.from_positions(
            coords, config.radio_range, side_length=side, seed=config.seed, attempt=attempt
        )
        labels = component_labels(topo)
        largest = np.bincount(labels).argmax()
        stranded = np.flatnonzero(labels != largest)
        if len(stranded) == 0:
            return topo
        coords = coords.copy()
        coords[stranded] = rng.uniform(0.0, side, size=(len(stranded), 2))
    raise ConnectivityUnreachable(
        f"topology still disconnected after {config.max_regen_attempts} repair rounds "
        f"(n={config.node_count}, density={config.target_density})"
    )


def component_labels(t: Topology) -> np.ndarray:
    labels = np.full(t.node_count, -1, dtype=int)
    adj = t.adjacency
    label = 0
    for s in range(t.node_count):
        if labels[s] >= 0:
            continue
        labels[s] = label
        stack = [s]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if labels[v] < 0:
                    labels[v] = label
                    stack.append(v)
        label += 1
    return labels


def is_connected(t: Topology) -> bool:
    n = t.node_count
    seen = [False] * n
    seen[0] = True
    count = 1
    queue = deque([0])
    adj = t.adjacency
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                queue.append(v)
    return count == n


def nodes_in_region(t: Topology, r: Rect) -> set[int]:
    return {i for i, p in enumerate(t.positions) if rect_contains(r, p)}

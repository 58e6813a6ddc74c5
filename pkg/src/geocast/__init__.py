"""Geographic multicast (geocast) routing with face-traversal gap recovery.

Modules build on each other in this order: geometry, topology, planar,
routing, protocols and baselines, simulator, oracle, harness, cli.
"""
from .geometry import Point, Rect
from .harness import ExperimentConfig, MetricsRow, run_experiment, run_sweep
from .oracle import check_guarantee, oracle_report
from .planar import gabriel, rng
from .protocols import make_protocol
from .simulator import GeocastResult, delivery_rate, overhead, run_geocast
from .topology import Topology, TopologyConfig, generate

__all__ = [
    "ExperimentConfig",
    "GeocastResult",
    "MetricsRow",
    "Point",
    "Rect",
    "Topology",
    "TopologyConfig",
    "check_guarantee",
    "delivery_rate",
    "gabriel",
    "generate",
    "make_protocol",
    "oracle_report",
    "overhead",
    "rng",
    "run_experiment",
    "run_geocast",
    "run_sweep",
]

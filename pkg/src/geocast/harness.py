"""Experiment sweeps: density x run x sender x protocol, aggregated into metric rows."""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import subprocess
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .geometry import Point, Rect
from .oracle import check_guarantee, dump_counterexample, oracle_report
from .planar import gabriel
from .protocols import PROTOCOL_NAMES, RegionView, make_protocol
from .simulator import overhead, run_geocast
from .topology import GENERATOR_NAME, Topology, TopologyConfig, generate, rng_for

log = logging.getLogger(__name__)

DEFAULT_DENSITIES = (6, 8, 10, 12, 14, 16, 18, 20)
ALL_PROTOCOLS = ("flood", "frfz", "arfz", "pcn", "gfg", "gfpg", "gfpg-star")
ORACLE_CHECKED = ("gfpg", "gfpg-star")
CSV_HEADER = [
    "protocol",
    "density",
    "delivery_rate",
    "overhead",
    "total_tx",
    "normalized_overhead",
    "runs",
    "delivery_se",
    "overhead_se",
]
WORKERS_ENV = "GEOCAST_WORKERS"


@dataclass(frozen=True)
class ExperimentConfig:
    node_count: int = 1000
    densities: tuple = DEFAULT_DENSITIES
    runs_per_density: int = 100
    senders_per_run: int = 10
    region_fraction: float = 1.0 / 25.0
    region_placement: str = "center"
    protocols: tuple = ALL_PROTOCOLS
    base_seed: int = 0
    output_path: Optional[str] = None
    output_format: str = "csv"
    counterexample_dir: Optional[str] = None
    connectivity: str = "repair"

    def __post_init__(self) -> None:
        object.__setattr__(self, "densities", tuple(self.densities))
        object.__setattr__(self, "protocols", tuple(normalize_protocol(p) for p in self.protocols))
        if self.node_count < 2:
            raise ValueError("node_count must be >= 2")
        if not self.densities or any(not d > 0 for d in self.densities):
            raise ValueError("densities must be a non-empty list of positive numbers")
        if self.runs_per_density < 1 or self.senders_per_run < 1:
            raise ValueError("runs and senders must be positive")
        if not 0.0 < self.region_fraction < 1.0:
            raise ValueError("region_fraction must lie in (0, 1)")
        if self.region_placement not in ("center", "border"):
            raise ValueError("region_placement must be 'center' or 'border'")
        if not self.protocols:
            raise ValueError("at least one protocol is required")
        if self.output_format not in ("csv", "json"):
            raise ValueError("output_format must be 'csv' or 'json'")

    @property
    def border_enhancements(self) -> bool:
        return self.region_placement == "border"


def normalize_protocol(name: str) -> str:
    key = name.strip().lower().replace("_", "-")
    if key in ("gfpg*", "gfpgstar"):
        key = "gfpg-star"
    if key not in PROTOCOL_NAMES:
        raise ValueError(f"unknown protocol {name!r}; expected one of {', '.join(PROTOCOL_NAMES)}")
    return key


@dataclass(frozen=True)
class MetricsRow:
    protocol: str
    density: float
    mean_delivery_rate: float
    mean_overhead: float
    mean_total_transmissions: float
    normalized_overhead: float
    run_count: int
    delivery_se: float
    overhead_se: float
    total_transmissions_se: float


@dataclass(frozen=True)
class RunSample:
    """Per-run means over that run's senders for one protocol."""

    delivery: float
    overhead: float
    total_tx: float
    oracle_failures: int = 0


@dataclass
class SweepResult:
    config: ExperimentConfig
    rows: list
    samples: dict = field(default_factory=dict)  # (protocol, density) -> list[RunSample] ordered by run
    oracle_checks: int = 0
    oracle_failures: int = 0
    resampled_empty_regions: int = 0
    counterexamples: list = field(default_factory=list)

    def row(self, protocol: str, density: float) -> MetricsRow:
        for r in self.rows:
            if r.protocol == protocol and r.density == density:
                return r
        raise KeyError((protocol, density))

    def series(self, protocol: str, density: float, metric: str) -> np.ndarray:
        return np.array([getattr(s, metric) for s in self.samples[(protocol, density)]], dtype=float)


def normalized_overhead(delivery_rate: float, protocol_overhead: float, flood_overhead: float) -> float:
    """Overhead if undelivered fractions fell back to global flooding."""
    return delivery_rate * protocol_overhead + (1.0 - delivery_rate) * flood_overhead


def place_region(side_length: float, fraction: float, placement: str) -> Rect:
    """Square region of area ``fraction * side^2``, centered or flush with the west edge."""
    s = side_length * math.sqrt(fraction)
    mid = side_length / 2.0
    if placement == "center":
        return Rect(Point(mid - s / 2.0, mid - s / 2.0), Point(mid + s / 2.0, mid + s / 2.0))
    if placement == "border":
        return Rect(Point(0.0, mid - s / 2.0), Point(s, mid + s / 2.0))
    raise ValueError(f"unknown placement {placement!r}")


def _density_key(density: float) -> int:
    return int(round(density * 1000))


def topology_seed(base_seed: int, density: float, run: int, resample: int = 0) -> int:
    """Independent 63-bit topology seed for each (density, run) cell."""
    ss = np.random.SeedSequence(entropy=base_seed, spawn_key=(_density_key(density), run, resample))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def draw_senders(t: Topology, view: RegionView, count: int, seed: int) -> list[int]:
    outside = [i for i in range(t.node_count) if not view.in_region[i]]
    if not outside:
        raise ValueError("every node lies inside the region; no external sender available")
    rng = rng_for(seed, 1)
    replace = len(outside) < count
    return [int(x) for x in rng.choice(outside, size=count, replace=replace)]


@dataclass
class RunScenario:
    topology: Topology
    planar: object
    region: Rect
    view: RegionView
    senders: list
    seed: int
    resamples: int


def build_scenario(config: ExperimentConfig, density: float, run: int) -> RunScenario:
    resample = 0
    while True:
        seed = topology_seed(config.base_seed, density, run, resample)
        t = generate(
            TopologyConfig(config.node_count, density, seed=seed, connectivity=config.connectivity)
        )
        region = place_region(t.side_length, config.region_fraction, config.region_placement)
        g = gabriel(t)
        view = RegionView(t, g, region)
        if view.region_nodes:
            senders = draw_senders(t, view, config.senders_per_run, seed)
            return RunScenario(t, g, region, view, senders, seed, resample)
        resample += 1
        if resample > 1000:
            raise RuntimeError(f"region empty in 1000 consecutive draws at density {density}")


def _run_cell(args: tuple) -> tuple:
    config, density, run = args
    sc = build_scenario(config, density, run)
    per_protocol = {}
    counterexamples = []
    checks = 0
    reports = {}
    for name in config.protocols:
        proto = make_protocol(name, border_enhancements=config.border_enhancements)
        deliveries, overheads, txs = [], [], []
        failures = 0
        for k, sender in enumerate(sc.senders):
            res = run_geocast(sc.topology, sc.planar, proto, sender, sc.region, view=sc.view, geocast_id=k)
            deliveries.append(len(res.delivered_region_nodes) / len(sc.view.region_nodes))
            overheads.append(overhead(res))
            txs.append(res.total_transmissions)
            if name in ORACLE_CHECKED:
                if sender not in reports:
                    reports[sender] = oracle_report(sc.topology, sender, sc.region)
                verdict = check_guarantee(res, reports[sender], seed=sc.seed)
                checks += 1
                if not verdict.passed:
                    failures += 1
                    log.warning("oracle FAIL %s density=%s run=%s sender=%s %s", name, density, run, sender, verdict)
                    if config.counterexample_dir:
                        counterexamples.append(
                            dump_counterexample(
                                config.counterexample_dir, sc.topology, sender, sc.region, name, verdict, sc.planar
                            )
                        )
        per_protocol[name] = RunSample(
            float(np.mean(deliveries)), float(np.mean(overheads)), float(np.mean(txs)), failures
        )
    return density, run, per_protocol, checks, counterexamples, sc.resamples


def _se(values: Sequence[float]) -> float:
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1) / math.sqrt(len(values)))


def aggregate(protocol: str, density: float, samples: Sequence[RunSample], node_count: int) -> MetricsRow:
    d = [s.delivery for s in samples]
    o = [s.overhead for s in samples]
    x = [s.total_tx for s in samples]
    md, mo = float(np.mean(d)), float(np.mean(o))
    return MetricsRow(
        protocol=protocol,
        density=density,
        mean_delivery_rate=md,
        mean_overhead=mo,
        mean_total_transmissions=float(np.mean(x)),
        normalized_overhead=normalized_overhead(md, mo, node_count),
        run_count=len(samples),
        delivery_se=_se(d),
        overhead_se=_se(o),
        total_transmissions_se=_se(x),
    )


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


def run_sweep(config: ExperimentConfig, workers: Optional[int] = None, progress: bool = False) -> SweepResult:
    tasks = [(config, d, r) for d in config.densities for r in range(config.runs_per_density)]
    workers = worker_count() if workers is None else workers
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_run_cell, tasks, chunksize=4))
    else:
        cells = []
        for i, task in enumerate(tasks):
            cells.append(_run_cell(task))
            if progress and (i + 1) % 50 == 0:
                log.info("%d/%d runs done", i + 1, len(tasks))
    # results are keyed by (density, run) so the reduction does not depend on scheduling
    cells.sort(key=lambda c: (config.densities.index(c[0]), c[1]))
    result = SweepResult(config, rows=[])
    for density, run, per_protocol, checks, dumps, resamples in cells:
        result.oracle_checks += checks
        result.resampled_empty_regions += resamples
        result.counterexamples.extend(dumps)
        for name, sample in per_protocol.items():
            result.samples.setdefault((name, density), []).append(sample)
            result.oracle_failures += sample.oracle_failures
    for name in config.protocols:
        for density in config.densities:
            result.rows.append(aggregate(name, density, result.samples[(name, density)], config.node_count))
    return result


def run_experiment(config: ExperimentConfig, workers: Optional[int] = None) -> list[MetricsRow]:
    return run_sweep(config, workers).rows


def git_describe() -> str:
    here = os.path.dirname(os.path.abspath(__file__))
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--tags", "--dirty"],
            cwd=here,
            capture_output=True,
            text=True,
            timeout=10,
        )
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return out.stdout.strip() or "unknown"


def _fmt(x: float) -> str:
    return repr(float(x))


def check_row(row: MetricsRow, node_count: int) -> None:
    expected = normalized_overhead(row.mean_delivery_rate, row.mean_overhead, node_count)
    if not math.isclose(expected, row.normalized_overhead, rel_tol=1e-12, abs_tol=1e-9):
        raise ValueError(f"inconsistent normalized overhead in row {row}")


def rows_to_csv(rows: Iterable[MetricsRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(
            [
                r.protocol,
                _fmt(r.density),
                _fmt(r.mean_delivery_rate),
                _fmt(r.mean_overhead),
                _fmt(r.mean_total_transmissions),
                _fmt(r.normalized_overhead),
                r.run_count,
                _fmt(r.delivery_se),
                _fmt(r.overhead_se),
            ]
        )
    return buf.getvalue()


def rows_to_json(rows: Iterable[MetricsRow], metadata: dict) -> str:
    doc = {"metadata": metadata, "rows": [asdict(r) for r in rows]}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def rows_from_json(text: str) -> list[MetricsRow]:
    return [MetricsRow(**r) for r in json.loads(text)["rows"]]


def metadata_for(config: ExperimentConfig) -> dict:
    cfg = asdict(config)
    cfg.pop("output_path", None)
    cfg.pop("counterexample_dir", None)
    return {
        "seed": config.base_seed,
        "generator": GENERATOR_NAME,
        "build": git_describe(),
        "config": cfg,
    }


def emit(rows: Sequence[MetricsRow], fmt: str, path: str, metadata: Optional[dict] = None, node_count: int = 1000) -> str:
    """Write rows as CSV or JSON; returns the path written."""
    for r in rows:
        check_row(r, node_count)
    if fmt == "csv":
        text = rows_to_csv(rows)
    elif fmt == "json":
        text = rows_to_json(rows, metadata or {})
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc.strerror or exc}") from exc
    return path

"""Command-line entry point: ``geocast {sweep,single,verify,topo}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from .harness import (
    ALL_PROTOCOLS,
    DEFAULT_DENSITIES,
    ExperimentConfig,
    build_scenario,
    emit,
    metadata_for,
    normalize_protocol,
    place_region,
    rows_to_csv,
    rows_to_json,
    run_sweep,
)
from .oracle import check_guarantee, dump_counterexample, oracle_report
from .planar import gabriel
from .protocols import RegionView, make_protocol
from .simulator import overhead, run_geocast
from .topology import ConnectivityUnreachable, TopologyConfig, generate, rng_for


class UsageError(Exception):
    pass


def _floats(text: str) -> tuple:
    try:
        vals = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return tuple(int(v) if v.is_integer() else v for v in vals)


def _names(text: str) -> tuple:
    try:
        return tuple(normalize_protocol(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_scenario_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--nodes", type=int, default=1000, help="node count (default 1000)")
    p.add_argument("--region-fraction", type=float, default=1.0 / 25.0)
    p.add_argument("--placement", choices=("center", "border"), default="center")
    p.add_argument("--connectivity", choices=("repair", "reject"), default="repair")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geocast", description="Geocast routing simulator and experiment harness.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="run a density sweep and write metric rows")
    _add_scenario_flags(sw)
    sw.add_argument("--densities", type=_floats, default=DEFAULT_DENSITIES)
    sw.add_argument("--runs", type=int, default=100, help="runs per density")
    sw.add_argument("--senders", type=int, default=10, help="senders per run")
    sw.add_argument("--protocols", type=_names, default=ALL_PROTOCOLS)
    sw.add_argument("--seed", type=int, default=0, help="base seed")
    sw.add_argument("--out", help="output file (stdout if omitted)")
    sw.add_argument("--format", choices=("csv", "json"), help="default: from --out extension, else csv")
    sw.add_argument("--counterexamples", metavar="DIR", help="directory for failing oracle cases")
    sw.add_argument("--workers", type=int, help="process count (default: $GEOCAST_WORKERS or 1)")

    si = sub.add_parser("single", help="one topology, one geocast")
    _add_scenario_flags(si)
    si.add_argument("--seed", type=int, default=0, help="topology seed")
    si.add_argument("--density", type=float, default=12)
    si.add_argument("--protocol", type=normalize_protocol, default="gfg")
    si.add_argument("--sender", type=int, help="sender node id (default: random node outside the region)")
    si.add_argument("--trace", action="store_true", help="print one line per transmission and drop")

    ve = sub.add_parser("verify", help="check delivery against the reachability oracle")
    _add_scenario_flags(ve)
    ve.add_argument("--protocol", type=normalize_protocol, default="gfpg")
    ve.add_argument("--densities", type=_floats, default=(6,))
    ve.add_argument("--runs", type=int, default=100, help="runs per density")
    ve.add_argument("--senders", type=int, default=10, help="senders per run")
    ve.add_argument("--seed", type=int, default=0, help="base seed")
    ve.add_argument("--counterexamples", metavar="DIR")

    to = sub.add_parser("topo", help="generate a topology and dump it as JSON")
    to.add_argument("--nodes", type=int, default=1000)
    to.add_argument("--density", type=float, default=12)
    to.add_argument("--seed", type=int, default=0)
    to.add_argument("--connectivity", choices=("repair", "reject"), default="repair")
    to.add_argument("--planar", action="store_true", help="include Gabriel graph edges")
    to.add_argument("--out", help="output file (stdout if omitted)")
    return parser


def _write(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from None


def cmd_sweep(args) -> int:
    fmt = args.format
    if fmt is None:
        fmt = "json" if args.out and args.out.endswith(".json") else "csv"
    config = ExperimentConfig(
        node_count=args.nodes,
        densities=args.densities,
        runs_per_density=args.runs,
        senders_per_run=args.senders,
        region_fraction=args.region_fraction,
        region_placement=args.placement,
        protocols=args.protocols,
        base_seed=args.seed,
        output_path=args.out,
        output_format=fmt,
        counterexample_dir=args.counterexamples,
        connectivity=args.connectivity,
    )
    result = run_sweep(config, workers=args.workers, progress=args.verbose)
    if args.out:
        try:
            emit(result.rows, fmt, args.out, metadata_for(config), config.node_count)
        except OSError as exc:
            raise UsageError(str(exc)) from None
    elif fmt == "csv":
        _write(rows_to_csv(result.rows), None)
    else:
        _write(rows_to_json(result.rows, metadata_for(config)), None)
    if result.oracle_checks:
        print(
            f"oracle: {result.oracle_checks - result.oracle_failures}/{result.oracle_checks} PASS",
            file=sys.stderr,
        )
    return 0


def cmd_single(args) -> int:
    t = generate(TopologyConfig(args.nodes, args.density, seed=args.seed, connectivity=args.connectivity))
    region = place_region(t.side_length, args.region_fraction, args.placement)
    g = gabriel(t)
    view = RegionView(t, g, region)
    if not view.region_nodes:
        raise UsageError("region contains no nodes for this seed; try another --seed")
    if args.sender is None:
        outside = [i for i in range(t.node_count) if not view.in_region[i]]
        sender = int(rng_for(args.seed, 1).choice(outside))
    else:
        if not 0 <= args.sender < t.node_count:
            raise UsageError(f"--sender must be in [0, {t.node_count})")
        sender = args.sender
    proto = make_protocol(args.protocol, border_enhancements=args.placement == "border")
    trace = print if args.trace else None
    res = run_geocast(t, g, proto, sender, region, view=view, trace=trace)
    verdict = check_guarantee(res, oracle_report(t, sender, region), seed=args.seed)
    summary = {
        "protocol": args.protocol,
        "seed": args.seed,
        "density": args.density,
        "sender": sender,
        "region_size": res.region_size,
        "delivered": len(res.delivered_region_nodes),
        "delivery_rate": len(res.delivered_region_nodes) / res.region_size,
        "overhead": overhead(res),
        "total_transmissions": res.total_transmissions,
        "unicast_path_length": res.unicast_path_length,
        "terminated_normally": res.terminated_normally,
        "oracle": str(verdict),
    }
    print(json.dumps(summary, indent=1))
    return 0


def cmd_verify(args) -> int:
    config = ExperimentConfig(
        node_count=args.nodes,
        densities=args.densities,
        runs_per_density=args.runs,
        senders_per_run=args.senders,
        region_fraction=args.region_fraction,
        region_placement=args.placement,
        protocols=(args.protocol,),
        base_seed=args.seed,
        counterexample_dir=args.counterexamples,
        connectivity=args.connectivity,
    )
    proto = make_protocol(args.protocol, border_enhancements=config.border_enhancements)
    total = passed = 0
    for density in config.densities:
        for run in range(config.runs_per_density):
            sc = build_scenario(config, density, run)
            ok = True
            for k, sender in enumerate(sc.senders):
                res = run_geocast(sc.topology, sc.planar, proto, sender, sc.region, view=sc.view, geocast_id=k)
                verdict = check_guarantee(res, oracle_report(sc.topology, sender, sc.region), seed=sc.seed)
                if not verdict.passed:
                    ok = False
                    print(f"FAIL density={density} run={run} sender={sender} {verdict}", file=sys.stderr)
                    if config.counterexample_dir:
                        dump_counterexample(
                            config.counterexample_dir, sc.topology, sender, sc.region, args.protocol, verdict, sc.planar
                        )
            total += 1
            passed += ok
    status = "PASS" if passed == total else "FAIL"
    print(f"{passed}/{total} {status}")
    return 0 if passed == total else 1


def cmd_topo(args) -> int:
    t = generate(TopologyConfig(args.nodes, args.density, seed=args.seed, connectivity=args.connectivity))
    planar = gabriel(t) if args.planar else None
    _write(t.to_json(planar) + "\n", args.out)
    return 0


COMMANDS = {"sweep": cmd_sweep, "single": cmd_single, "verify": cmd_verify, "topo": cmd_topo}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, ConnectivityUnreachable) as exc:
        print(f"geocast {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

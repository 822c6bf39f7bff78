"""Command line entry point: run suites, decode packets, trace a run."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench, comm
from .agent import Controller
from .engine import run_simulation
from .world import ConfigError


def _cmd_run(args):
    if args.suite:
        suite = bench.load_suite(args.suite, replicates=args.replicates,
                                 seed_base=args.seed_base)
    else:
        suite = bench.default_suite(paper_scale=args.paper_scale,
                                    replicates=args.replicates,
                                    seed_base=args.seed_base
                                    if args.seed_base is not None
                                    else bench.DEFAULT_SEED_BASE)
    results, failures = bench.run_matrix(suite, jobs=args.jobs)
    text = bench.emit_results(results, args.format)
    if args.out:
        out = Path(args.out)
        try:
            out.write_text(text)
            if args.format == "csv":
                series_path = out.with_name(out.stem + "_series.csv")
                series_path.write_text(bench.series_csv(results))
        except OSError as exc:
            print(f"error writing {args.out}: {exc}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    for spec, exc in failures:
        print(f"experiment {spec.name} failed: {exc}", file=sys.stderr)
    return 1 if failures else 0


def _cmd_decode_packet(args):
    try:
        data = bytes.fromhex(args.hex)
    except ValueError as exc:
        print(f"bad hex: {exc}", file=sys.stderr)
        return 1
    try:
        pkt = comm.decode(data)
    except comm.DecodeError as exc:
        print(f"decode error: {exc}", file=sys.stderr)
        return 1
    print(f"x            = {pkt.x}")
    print(f"y            = {pkt.y}")
    print(f"state_code   = {pkt.state_code}")
    print(f"reserved     = {pkt.reserved}")
    print(f"entity_id    = {pkt.entity_id}")
    print(f"pheromone_q  = {pkt.pheromone_q}")
    print(f"hex          = {comm.encode(pkt).hex()}")
    return 0


def _cmd_trace(args):
    base = bench.base_sim_config(paper_scale=args.paper_scale)
    from dataclasses import replace
    cfg = replace(base, controller=Controller(args.controller),
                  ticks=args.ticks, seed=args.seed)
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        def emit(event):
            out.write(json.dumps(event) + "\n")
        metrics = run_simulation(cfg, trace=emit)
    finally:
        if args.out:
            out.close()
    print(f"blocks={metrics.blocks_collected} inaccuracies={metrics.inaccuracies} "
          f"performance={metrics.performance}", file=sys.stderr)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="swarmforage",
        description="Foraging swarm simulator with goal-based communication.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment suite")
    run.add_argument("suite", nargs="?", default=None,
                     help="YAML suite file (default: built-in 9+RCS+CRW matrix)")
    run.add_argument("--out", help="write results here (csv also writes *_series.csv)")
    run.add_argument("--format", choices=["csv", "json", "table"], default="csv")
    run.add_argument("--seed-base", type=int, default=None)
    run.add_argument("--replicates", type=int, default=None)
    run.add_argument("--paper-scale", action="store_true",
                     help="128 robots / 75 blocks / 50 replicates preset")
    run.add_argument("--jobs", type=int, default=1,
                     help="replicate-level parallelism (deterministic output)")
    run.set_defaults(func=_cmd_run)

    dec = sub.add_parser("decode-packet", help="decode a 6-byte packet from hex")
    dec.add_argument("hex", help="12 hex digits, e.g. 1403020007c8")
    dec.set_defaults(func=_cmd_decode_packet)

    trace = sub.add_parser("trace", help="single run with a JSON-lines event log")
    trace.add_argument("--controller", choices=[c.value for c in Controller],
                       default="utility")
    trace.add_argument("--seed", type=int, default=0)
    trace.add_argument("--ticks", type=int, default=1000)
    trace.add_argument("--paper-scale", action="store_true")
    trace.add_argument("--out", help="event log path (default: stdout)")
    trace.set_defaults(func=_cmd_trace)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command line entry point.

Subcommands: `run` (execute an experiment from a config file and/or flags),
`build-cost-table` (empirical phi table for the vcesize benefit pattern),
`verify` (tiny-instance invariant suite) and `dump-topology`.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields

from vcesim.runner import ExperimentConfig, build_graph, run_experiment
from vcesim.substrate import dump_topology
from vcesim.workload import build_empirical_cost_table


def _add_topology_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--topology", choices=["fat-tree", "bcube", "mdcube"])
    parser.add_argument("--k", type=int, help="fat-tree port count")
    parser.add_argument("--n", type=int, help="BCube arity")
    parser.add_argument("--level", type=int, help="BCube level k")
    parser.add_argument("--containers", type=int, help="MDCube container count")
    parser.add_argument("--server-cap", type=int, dest="server_cap")
    parser.add_argument("--edge-cap", type=int, dest="edge_cap")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vcesim")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment")
    run.add_argument("--config", help="key = value config file; flags override")
    _add_topology_flags(run)
    run.add_argument("--pattern", choices=["random", "reqsize", "vcesize", "wave", "peak"])
    run.add_argument("--lo", type=int)
    run.add_argument("--hi", type=int)
    run.add_argument("--amplitude", type=float)
    run.add_argument("--frequency", type=float)
    run.add_argument("--offset", type=float)
    run.add_argument("--period", type=int)
    run.add_argument("--peak-value", type=int, dest="peak_value")
    run.add_argument("--base-value", type=int, dest="base_value")
    run.add_argument("--cost-table", dest="cost_table")
    run.add_argument("--scale-max", type=int, dest="scale_max")
    run.add_argument("--length", type=int)
    run.add_argument("--window", type=int)
    run.add_argument("--seeds", help="comma-separated seed list")
    run.add_argument("--algs", help="all or comma-separated algorithm names")
    run.add_argument("--fixed-alpha", type=float, dest="fixed_alpha")
    run.add_argument("--parallelism", type=int)
    run.add_argument("--out", help="output directory")

    table = sub.add_parser("build-cost-table", help="build the vcesize phi table")
    _add_topology_flags(table)
    table.add_argument("--experiments", type=int, default=5)
    table.add_argument("--requests", type=int, default=400)
    table.add_argument("--seed", type=int, default=1)
    table.add_argument("--out", required=True)

    verify = sub.add_parser("verify", help="run the tiny-instance invariant suite")
    verify.add_argument("--instances", type=int, default=30)
    verify.add_argument("--seed", type=int, default=7)

    dump = sub.add_parser("dump-topology", help="print a plain-text topology dump")
    _add_topology_flags(dump)
    dump.add_argument("--out", help="target file (default: stdout)")

    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {}
    for f in fields(ExperimentConfig):
        if hasattr(args, f.name) and getattr(args, f.name) is not None:
            overrides[f.name] = getattr(args, f.name)
    if getattr(args, "seeds", None):
        overrides["seeds"] = tuple(int(s) for s in args.seeds.split(",") if s.strip())
    if getattr(args, "algs", None):
        if args.algs == "all":
            overrides["algorithms"] = ("greedy", "covce", "covceload", "gvop")
        else:
            overrides["algorithms"] = tuple(s.strip() for s in args.algs.split(","))
    if args.config:
        return ExperimentConfig.from_file(args.config, **overrides)
    return ExperimentConfig(**overrides)


def _topology_config(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {
        name: getattr(args, name)
        for name in ("topology", "k", "n", "level", "containers", "server_cap", "edge_cap")
        if getattr(args, name, None) is not None
    }
    return ExperimentConfig(**overrides)


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            config = _config_from_args(args)
            out = run_experiment(config)
            print(f"wrote results to {out}")
            return 0
        if args.command == "build-cost-table":
            graph = build_graph(_topology_config(args))
            table = build_empirical_cost_table(args.seed, args.experiments, args.requests, graph)
            table.to_csv(args.out)
            print(f"wrote {len(table.phi)} triples to {args.out}")
            return 0
        if args.command == "verify":
            from vcesim.offline import run_verification

            return 0 if run_verification(args.instances, args.seed) else 1
        if args.command == "dump-topology":
            text = dump_topology(build_graph(_topology_config(args)))
            if args.out:
                with open(args.out, "w") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
            return 0
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    raise SystemExit(main())

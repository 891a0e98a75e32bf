"""Experiment orchestration: config, seeded repetitions, CSV persistence.

A run directory contains one `seed_<s>/` folder per seed with the generated
sequence, per-algorithm decision logs, metric series and acceptance-ratio
windows, an `averaged/` folder with the across-seed means, and a
`manifest.txt` recording the configuration. Every output byte is determined
by the configuration.
"""

from __future__ import annotations

import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

from vcesim import metrics
from vcesim.algorithms import ALGORITHMS, run_sequence, write_decision_csv
from vcesim.substrate import SubstrateGraph, build_bcube, build_fat_tree, build_mdcube
from vcesim.workload import (
    EmpiricalCostTable,
    PeakBenefit,
    RandomBenefit,
    ReqSizeBenefit,
    VceSizeBenefit,
    WaveBenefit,
    generate_sequence,
    write_sequence_csv,
)

__all__ = ["ExperimentConfig", "run_experiment", "build_graph", "build_pattern"]

_TOPOLOGIES = ("fat-tree", "bcube", "mdcube")
_PATTERNS = ("random", "reqsize", "vcesize", "wave", "peak")


@dataclass(frozen=True)
class ExperimentConfig:
    topology: str = "fat-tree"
    k: int = 4
    n: int = 12
    level: int = 1
    containers: int = 4
    server_cap: int = 20
    edge_cap: int = 20
    pattern: str = "random"
    lo: int = 1
    hi: int = 1000
    amplitude: float = 300.0
    frequency: float = 0.1
    offset: float = 400.0
    period: int = 100
    peak_value: int = 1000
    base_value: int = 1
    cost_table: str | None = None
    scale_max: int = 1000
    length: int = 6400
    window: int = 100
    seeds: tuple[int, ...] = (1,)
    algorithms: tuple[str, ...] = ("greedy", "covce", "covceload", "gvop")
    fixed_alpha: float | None = None
    out: str = ""
    parallelism: int = 1

    def validate(self) -> None:
        if not self.out:
            raise ValueError("output directory required (set --out or the out key)")
        if self.topology not in _TOPOLOGIES:
            raise ValueError(f"unknown topology {self.topology!r}")
        if self.pattern not in _PATTERNS:
            raise ValueError(f"unknown pattern {self.pattern!r}")
        if self.length < 1:
            raise ValueError("length must be >= 1")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if not self.seeds:
            raise ValueError("need at least one seed")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms {sorted(unknown)}")
        if self.pattern == "vcesize" and not self.cost_table:
            raise ValueError("vcesize pattern needs a cost_table file")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        build_pattern(self, None)  # validates pattern parameters

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "ExperimentConfig":
        """Flat `key = value` config file; later CLI overrides win."""
        values: dict = {}
        known = {f.name: f for f in fields(cls)}
        for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if key not in known:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _parse_value(key, value.strip())
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


def _parse_value(key: str, text: str):
    if key == "seeds":
        return tuple(int(s) for s in text.split(",") if s.strip())
    if key == "algorithms":
        if text == "all":
            return tuple(ALGORITHMS)
        return tuple(s.strip() for s in text.split(",") if s.strip())
    if key in ("out", "topology", "pattern", "cost_table"):
        return text
    if key in ("amplitude", "frequency", "offset", "fixed_alpha"):
        return float(text)
    return int(text)


def build_graph(config: ExperimentConfig) -> SubstrateGraph:
    if config.topology == "fat-tree":
        return build_fat_tree(config.k, config.server_cap, config.edge_cap)
    if config.topology == "bcube":
        return build_bcube(config.n, config.level, config.server_cap, config.edge_cap)
    return build_mdcube(
        config.containers, config.n, config.level, config.server_cap, config.edge_cap
    )


def build_pattern(config: ExperimentConfig, graph: SubstrateGraph | None):
    """Instantiate the configured benefit pattern (graph needed for vcesize)."""
    if config.pattern == "random":
        return RandomBenefit(config.lo, config.hi)
    if config.pattern == "reqsize":
        return ReqSizeBenefit()
    if config.pattern == "wave":
        return WaveBenefit(config.amplitude, config.frequency, config.offset)
    if config.pattern == "peak":
        return PeakBenefit(config.period, config.peak_value, config.base_value)
    if graph is None:
        return None  # vcesize validated once the graph exists
    table = EmpiricalCostTable.from_csv(config.cost_table)
    return VceSizeBenefit.from_table(
        table, graph, config.server_cap, config.edge_cap, config.scale_max
    )


def _run_one(config: ExperimentConfig, seed: int, algorithm: str) -> None:
    graph = build_graph(config)
    pattern = build_pattern(config, graph)
    requests = generate_sequence(
        seed, config.length, pattern, config.server_cap, config.edge_cap
    )
    result = run_sequence(
        algorithm, graph, requests,
        fixed_alpha=config.fixed_alpha, window_width=config.window,
    )
    seed_dir = Path(config.out) / f"seed_{seed}"
    write_decision_csv(seed_dir / f"{algorithm}_decisions.csv", result.records)
    metrics.write_metrics_csv(seed_dir / f"{algorithm}_metrics.csv", algorithm, result.series)
    metrics.write_windows_csv(seed_dir / f"{algorithm}_windows.csv", algorithm, result.series)
    if result.fixed_alpha_exceeded:
        (seed_dir / f"{algorithm}_alpha_exceeded.txt").write_text(
            f"max benefit {result.state.max_benefit_seen} exceeded fixed alpha "
            f"{config.fixed_alpha}\n"
        )


def _read_series(config: ExperimentConfig, seed: int, algorithm: str) -> metrics.MetricsSeries:
    seed_dir = Path(config.out) / f"seed_{seed}"
    cols = metrics.read_metrics_csv(seed_dir / f"{algorithm}_metrics.csv")
    windows = metrics.read_windows_csv(seed_dir / f"{algorithm}_windows.csv")
    return metrics.MetricsSeries(
        violation=cols["violation"],
        avg_violation=cols["avg_violation"],
        cum_profit=cols["cum_profit"],
        relative_profit=cols["relative_profit"],
        avg_relative_profit=cols["avg_relative_profit"],
        acceptance_windows=windows,
        window_width=config.window,
    )


def run_experiment(config: ExperimentConfig) -> Path:
    """Run every (seed, algorithm) pair and persist the CSV tree."""
    config.validate()
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    graph = build_graph(config)
    pattern = build_pattern(config, graph)

    for seed in config.seeds:
        seed_dir = out / f"seed_{seed}"
        seed_dir.mkdir(parents=True, exist_ok=True)
        requests = generate_sequence(
            seed, config.length, pattern, config.server_cap, config.edge_cap
        )
        write_sequence_csv(seed_dir / "sequence.csv", requests)

    jobs = [(seed, algorithm) for seed in config.seeds for algorithm in config.algorithms]
    if config.parallelism > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.parallelism) as pool:
            futures = [pool.submit(_run_one, config, s, a) for s, a in jobs]
            for f in futures:
                f.result()
    else:
        for seed, algorithm in jobs:
            _run_one(config, seed, algorithm)

    averaged = out / "averaged"
    averaged.mkdir(exist_ok=True)
    for algorithm in config.algorithms:
        series = [_read_series(config, seed, algorithm) for seed in config.seeds]
        mean = metrics.average_across_runs(series)
        metrics.write_metrics_csv(averaged / f"{algorithm}_metrics.csv", algorithm, mean)
        metrics.write_windows_csv(averaged / f"{algorithm}_windows.csv", algorithm, mean)

    from vcesim import __version__ as version

    manifest = [f"vcesim_version = {version}", f"python = {sys.version.split()[0]}"]
    for f in sorted(fields(ExperimentConfig), key=lambda f: f.name):
        value = getattr(config, f.name)
        if isinstance(value, tuple):
            value = ",".join(str(v) for v in value)
        manifest.append(f"{f.name} = {value}")
    (out / "manifest.txt").write_text("\n".join(manifest) + "\n")
    return out

#!/usr/bin/env python3
"""End-to-end experiment: config -> seeded runs -> CSV tree -> averaged series."""

import tempfile
from pathlib import Path

from vcesim import ExperimentConfig, run_experiment
from vcesim.metrics import read_metrics_csv, read_windows_csv
from vcesim.workload import build_empirical_cost_table
from vcesim.substrate import build_fat_tree

workdir = Path(tempfile.mkdtemp(prefix="vcesim_demo_"))

config = ExperimentConfig(
    topology="fat-tree",
    k=4,
    pattern="wave",      # 300*sin(0.1*i) + 400
    length=300,
    window=50,
    seeds=(1, 2, 3),
    algorithms=("greedy", "covce", "covceload", "gvop"),
    out=str(workdir / "wave_run"),
)
out = run_experiment(config)
print("run directory:")
for path in sorted(out.rglob("*.csv"))[:8]:
    print("  ", path.relative_to(out))
print("   ... plus manifest.txt")

averaged = read_metrics_csv(out / "averaged" / "covce_metrics.csv")
print("\nCOVCE averaged over 3 seeds at request 300:")
print("  cum profit      :", averaged["cum_profit"][-1])
print("  violation       :", averaged["violation"][-1])
print("  relative profit :", averaged["relative_profit"][-1])
windows = read_windows_csv(out / "averaged" / "gvop_windows.csv")
print("GVOP acceptance ratio per 50-request window:", [round(w, 2) for w in windows])

# The vcesize benefit pattern needs an empirical cost table first; desk scale
# keeps this quick (the paper-scale table ran 100 x 6400 requests).
graph = build_fat_tree(4)
table = build_empirical_cost_table(seed=5, num_experiments=2, requests_per_experiment=150, graph=graph)
table_path = workdir / "phi.csv"
table.to_csv(table_path)
print(f"\nempirical cost table: {len(table.phi)} triples -> {table_path}")

vcesize = ExperimentConfig(
    topology="fat-tree", k=4, pattern="vcesize", cost_table=str(table_path),
    length=200, window=50, seeds=(1,), algorithms=("covce",),
    out=str(workdir / "vcesize_run"),
)
run_experiment(vcesize)
print("vcesize run:", workdir / "vcesize_run")

# Identical configs replay byte-for-byte; see tests/test_acceptance.py for
# the full determinism check.

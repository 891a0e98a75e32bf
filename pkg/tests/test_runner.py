import filecmp
from pathlib import Path

import numpy as np
import pytest

from vcesim.cli import main as cli_main
from vcesim.metrics import read_metrics_csv, read_windows_csv
from vcesim.runner import ExperimentConfig, build_graph, build_pattern, run_experiment
from vcesim.workload import EmpiricalCostTable


def desk_config(out, **kw):
    defaults = dict(
        topology="fat-tree",
        k=4,
        pattern="random",
        length=60,
        window=10,
        seeds=(1, 2),
        algorithms=("greedy", "covce"),
        out=str(out),
    )
    defaults.update(kw)
    return ExperimentConfig(**defaults)


def tree_bytes(root: Path) -> dict[str, bytes]:
    return {
        str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()
    }


def test_run_experiment_layout(tmp_path):
    out = run_experiment(desk_config(tmp_path / "run"))
    for seed in (1, 2):
        assert (out / f"seed_{seed}" / "sequence.csv").exists()
        for alg in ("greedy", "covce"):
            for kind in ("decisions", "metrics", "windows"):
                assert (out / f"seed_{seed}" / f"{alg}_{kind}.csv").exists()
    assert (out / "averaged" / "greedy_metrics.csv").exists()
    assert (out / "manifest.txt").exists()
    manifest = (out / "manifest.txt").read_text()
    assert "seeds = 1,2" in manifest
    assert "topology = fat-tree" in manifest


def test_run_experiment_deterministic(tmp_path):
    config = desk_config(tmp_path / "run")
    first = tree_bytes(run_experiment(config))
    second = tree_bytes(run_experiment(config))
    assert first == second
    # and a different output directory only changes the manifest
    other = tree_bytes(run_experiment(desk_config(tmp_path / "other")))
    first.pop("manifest.txt")
    other.pop("manifest.txt")
    assert first == other


def test_averaged_series_is_mean_of_seeds(tmp_path):
    out = run_experiment(desk_config(tmp_path / "run"))
    per_seed = [
        read_metrics_csv(out / f"seed_{s}" / "covce_metrics.csv")["relative_profit"]
        for s in (1, 2)
    ]
    averaged = read_metrics_csv(out / "averaged" / "covce_metrics.csv")["relative_profit"]
    assert np.allclose(averaged, np.mean(per_seed, axis=0), rtol=0, atol=0)
    per_seed_w = [read_windows_csv(out / f"seed_{s}" / "covce_windows.csv") for s in (1, 2)]
    averaged_w = read_windows_csv(out / "averaged" / "covce_windows.csv")
    assert np.allclose(averaged_w, np.mean(per_seed_w, axis=0), rtol=0, atol=0)


def test_parallel_run_matches_serial(tmp_path):
    serial = run_experiment(desk_config(tmp_path / "serial"))
    parallel = run_experiment(desk_config(tmp_path / "parallel", parallelism=2))
    ta, tb = tree_bytes(serial), tree_bytes(parallel)
    ta.pop("manifest.txt")
    tb.pop("manifest.txt")  # manifests differ in the parallelism key
    assert ta == tb


def test_invalid_configs_rejected(tmp_path):
    with pytest.raises(ValueError):
        desk_config(tmp_path, topology="hypercube").validate()
    with pytest.raises(ValueError):
        desk_config(tmp_path, pattern="fancy").validate()
    with pytest.raises(ValueError):
        desk_config(tmp_path, seeds=()).validate()
    with pytest.raises(ValueError):
        desk_config(tmp_path, algorithms=("covce", "magic")).validate()
    with pytest.raises(ValueError):
        desk_config(tmp_path, length=0).validate()
    with pytest.raises(ValueError):
        desk_config(tmp_path, pattern="vcesize").validate()
    with pytest.raises(ValueError):
        ExperimentConfig(length=5).validate()  # no output directory


def test_config_file_parsing(tmp_path):
    path = tmp_path / "exp.conf"
    path.write_text(
        "# desk experiment\n"
        "topology = fat-tree\n"
        "k = 4\n"
        "pattern = peak\n"
        "period = 50\n"
        "peak-value = 500\n"
        "length = 30\n"
        "seeds = 3,4\n"
        "algorithms = greedy,gvop\n"
        f"out = {tmp_path / 'results'}\n"
    )
    config = ExperimentConfig.from_file(path)
    assert config.pattern == "peak"
    assert config.period == 50
    assert config.peak_value == 500
    assert config.seeds == (3, 4)
    assert config.algorithms == ("greedy", "gvop")
    override = ExperimentConfig.from_file(path, length=10)
    assert override.length == 10
    bad = tmp_path / "bad.conf"
    bad.write_text("nonsense = 1\n")
    with pytest.raises(ValueError):
        ExperimentConfig.from_file(bad)


def test_vcesize_pattern_through_runner(tmp_path):
    graph = build_graph(desk_config(tmp_path, topology="fat-tree", k=4))
    table = EmpiricalCostTable(
        {(n, b, c): float(n * b) for n in range(3, 15) for b in (4, 12) for c in (4, 20)},
        {},
    )
    table_path = tmp_path / "table.csv"
    table.to_csv(table_path)
    config = desk_config(
        tmp_path / "run", pattern="vcesize", cost_table=str(table_path), length=20,
        seeds=(1,), algorithms=("greedy",),
    )
    out = run_experiment(config)
    assert (out / "seed_1" / "sequence.csv").exists()
    pattern = build_pattern(config, graph)
    assert pattern.benefit(1, 3, 4, 4, None) >= 1


def test_cli_run_and_dump(tmp_path, capsys):
    out = tmp_path / "cli_run"
    code = cli_main(
        [
            "run", "--topology", "fat-tree", "--k", "4", "--pattern", "random",
            "--length", "30", "--seeds", "1", "--algs", "greedy,covce",
            "--window", "10", "--out", str(out),
        ]
    )
    assert code == 0
    assert (out / "seed_1" / "covce_metrics.csv").exists()
    capsys.readouterr()  # drop the run subcommand's status line

    code = cli_main(["dump-topology", "--topology", "bcube", "--n", "2", "--level", "1"])
    assert code == 0
    dump = capsys.readouterr().out
    assert len([l for l in dump.splitlines() if l]) == 8 + 8  # nodes + edges


def test_cli_requires_out(tmp_path):
    code = cli_main(
        ["run", "--topology", "fat-tree", "--k", "4", "--length", "5", "--seeds", "1"]
    )
    assert code == 1


def test_cli_build_cost_table_and_verify(tmp_path):
    table_path = tmp_path / "phi.csv"
    code = cli_main(
        [
            "build-cost-table", "--topology", "fat-tree", "--k", "4",
            "--experiments", "1", "--requests", "40", "--seed", "5",
            "--out", str(table_path),
        ]
    )
    assert code == 0
    table = EmpiricalCostTable.from_csv(table_path)
    assert table.phi
    assert cli_main(["verify", "--instances", "4", "--seed", "11"]) == 0


def test_cli_unknown_flag():
    with pytest.raises(SystemExit):
        cli_main(["run", "--frobnicate"])

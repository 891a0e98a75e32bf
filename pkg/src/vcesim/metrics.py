"""Evaluation metrics: capacity violation, relative profit, acceptance ratio.

The violation is the worst load/capacity ratio over all capacitated
resources, floored at 1; the average violation adds the mean edge ratio and
the mean server ratio (implemented verbatim, so a fully loaded network scores
2). Relative profit divides the accepted benefit sum by the respective
violation. Zero-capacity nodes (switches) are excluded everywhere.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "violation",
    "avg_violation",
    "relative_profit",
    "avg_relative_profit",
    "acceptance_ratio_windows",
    "MetricsSeries",
    "average_across_runs",
    "write_metrics_csv",
    "write_windows_csv",
    "read_metrics_csv",
    "read_windows_csv",
]


def violation(node_load, edge_load, node_caps, edge_caps) -> float:
    """max(1, worst load/cap ratio over capacitated nodes and edges)."""
    worst = 1.0
    capacitated = node_caps > 0
    if capacitated.any():
        worst = max(worst, float((node_load[capacitated] / node_caps[capacitated]).max()))
    if len(edge_caps):
        worst = max(worst, float((edge_load / edge_caps).max()))
    return worst


def avg_violation(node_load, edge_load, node_caps, edge_caps) -> float:
    """max(1, mean edge ratio + mean capacitated-node ratio)."""
    total = 0.0
    if len(edge_caps):
        total += float((edge_load / edge_caps).mean())
    capacitated = node_caps > 0
    if capacitated.any():
        total += float((node_load[capacitated] / node_caps[capacitated]).mean())
    return max(1.0, total)


def relative_profit(cum_profit: float, violation_value: float) -> float:
    if violation_value < 1.0:
        raise ValueError("violation is floored at 1")
    return cum_profit / violation_value


def avg_relative_profit(cum_profit: float, avg_violation_value: float) -> float:
    return relative_profit(cum_profit, avg_violation_value)


def acceptance_ratio_windows(accepted, width: int = 100) -> list[float]:
    """Fraction of accepted requests per window; the final partial window is
    normalized by its actual size."""
    if width < 1:
        raise ValueError("window width must be >= 1")
    flags = [bool(a) for a in accepted]
    ratios = []
    for start in range(0, len(flags), width):
        block = flags[start : start + width]
        ratios.append(sum(block) / len(block))
    return ratios


@dataclass
class MetricsSeries:
    """Per-request-index metric series plus windowed acceptance ratios."""

    violation: np.ndarray
    avg_violation: np.ndarray
    cum_profit: np.ndarray
    relative_profit: np.ndarray
    avg_relative_profit: np.ndarray
    acceptance_windows: np.ndarray
    window_width: int

    def __len__(self) -> int:
        return len(self.violation)

    def __post_init__(self):
        n = len(self.violation)
        for name in ("avg_violation", "cum_profit", "relative_profit", "avg_relative_profit"):
            if len(getattr(self, name)) != n:
                raise ValueError("metric series lengths differ")
        if len(self.acceptance_windows) != math.ceil(n / self.window_width):
            raise ValueError("window count does not match sequence length")


def average_across_runs(series_list: list[MetricsSeries]) -> MetricsSeries:
    """Pointwise arithmetic mean of equally shaped series."""
    if not series_list:
        raise ValueError("need at least one series")
    first = series_list[0]
    if any(len(s) != len(first) or s.window_width != first.window_width for s in series_list):
        raise ValueError("series lengths or window widths differ")

    def mean(attr: str) -> np.ndarray:
        return np.mean([getattr(s, attr) for s in series_list], axis=0)

    return MetricsSeries(
        violation=mean("violation"),
        avg_violation=mean("avg_violation"),
        cum_profit=mean("cum_profit"),
        relative_profit=mean("relative_profit"),
        avg_relative_profit=mean("avg_relative_profit"),
        acceptance_windows=mean("acceptance_windows"),
        window_width=first.window_width,
    )


def write_metrics_csv(path: str | Path, algorithm: str, series: MetricsSeries) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["index", "algorithm", "cum_profit", "violation", "avg_violation",
             "relative_profit", "avg_relative_profit"]
        )
        for i in range(len(series)):
            writer.writerow(
                [
                    i + 1,
                    algorithm,
                    repr(float(series.cum_profit[i])),
                    repr(float(series.violation[i])),
                    repr(float(series.avg_violation[i])),
                    repr(float(series.relative_profit[i])),
                    repr(float(series.avg_relative_profit[i])),
                ]
            )


def write_windows_csv(path: str | Path, algorithm: str, series: MetricsSeries) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["window_index", "algorithm", "acceptance_ratio"])
        for i, ratio in enumerate(series.acceptance_windows):
            writer.writerow([i + 1, algorithm, repr(float(ratio))])


def read_metrics_csv(path: str | Path) -> dict[str, np.ndarray]:
    rows = list(csv.DictReader(open(path, newline="")))
    out: dict[str, np.ndarray] = {}
    for col in ("cum_profit", "violation", "avg_violation", "relative_profit",
                "avg_relative_profit"):
        out[col] = np.array([float(r[col]) for r in rows])
    out["index"] = np.array([int(r["index"]) for r in rows])
    return out


def read_windows_csv(path: str | Path) -> np.ndarray:
    rows = list(csv.DictReader(open(path, newline="")))
    return np.array([float(r["acceptance_ratio"]) for r in rows])

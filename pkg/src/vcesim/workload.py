"""Seeded online request sequences and benefit pattern assignment.

Sequences are generated with NumPy's PCG64 generator so an identical
(seed, length, pattern, caps) tuple replays byte-identically on any platform.
Request sizes follow the standard intervals: 3..14 VMs, bandwidth drawn from
20-60% of the edge capacity and compute from 20-100% of the node capacity,
both rounded half-up to integers.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "VCRequest",
    "RandomBenefit",
    "ReqSizeBenefit",
    "WaveBenefit",
    "PeakBenefit",
    "VceSizeBenefit",
    "EmpiricalCostTable",
    "generate_sequence",
    "build_empirical_cost_table",
    "round_half_up",
    "write_sequence_csv",
    "read_sequence_csv",
]


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class VCRequest:
    """One virtual cluster demand in the online sequence (1-based index)."""

    index: int
    n_vms: int
    bandwidth: int
    compute: int
    benefit: int

    def __post_init__(self):
        if self.n_vms < 1 or self.bandwidth < 1 or self.compute < 1 or self.benefit < 1:
            raise ValueError(f"invalid request {self}")


@dataclass(frozen=True)
class RandomBenefit:
    """Uniform integer benefit in [lo, hi]."""

    lo: int = 1
    hi: int = 1000

    def __post_init__(self):
        if self.lo < 1 or self.hi < self.lo:
            raise ValueError("random benefit needs 1 <= lo <= hi")

    def benefit(self, i, n_vms, bandwidth, compute, rng) -> int:
        return int(rng.integers(self.lo, self.hi + 1))


@dataclass(frozen=True)
class ReqSizeBenefit:
    """Benefit proportional to the request size: n_vms * (bandwidth + compute)."""

    def benefit(self, i, n_vms, bandwidth, compute, rng) -> int:
        return n_vms * (bandwidth + compute)


@dataclass(frozen=True)
class WaveBenefit:
    """Sinusoidal benefit amplitude*sin(frequency*i) + offset, rounded half-up."""

    amplitude: float = 300.0
    frequency: float = 0.1
    offset: float = 400.0

    def __post_init__(self):
        if round_half_up(self.offset - self.amplitude) < 1:
            raise ValueError("wave trough must stay >= 1 after rounding")

    def benefit(self, i, n_vms, bandwidth, compute, rng) -> int:
        return max(1, round_half_up(self.amplitude * math.sin(self.frequency * i) + self.offset))


@dataclass(frozen=True)
class PeakBenefit:
    """peak_value on every period-th request starting at the first, else base."""

    period: int = 100
    peak_value: int = 1000
    base_value: int = 1

    def __post_init__(self):
        if self.period < 1 or self.peak_value < 1 or self.base_value < 1:
            raise ValueError("peak pattern values must be >= 1")

    def benefit(self, i, n_vms, bandwidth, compute, rng) -> int:
        return self.peak_value if i % self.period == 1 % self.period else self.base_value


class EmpiricalCostTable:
    """Mean allocated edge-bandwidth per (n_vms, bandwidth, compute) triple."""

    def __init__(self, phi: dict[tuple[int, int, int], float], samples: dict[tuple[int, int, int], int]):
        self.phi = dict(phi)
        self.samples = dict(samples)
        if any(v < 0 for v in self.phi.values()):
            raise ValueError("phi values must be nonnegative")

    def lookup(self, n_vms: int, bandwidth: int, compute: int, fallback: bool = True) -> float:
        key = (n_vms, bandwidth, compute)
        if key in self.phi:
            return self.phi[key]
        if not fallback or not self.phi:
            raise KeyError(f"no empirical cost for triple {key}")
        # nearest observed triple under L1 distance, ties to the smaller triple
        best = min(
            self.phi,
            key=lambda t: (abs(t[0] - n_vms) + abs(t[1] - bandwidth) + abs(t[2] - compute), t),
        )
        return self.phi[best]

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["n_vms", "bandwidth", "compute", "phi", "samples"])
            for key in sorted(self.phi):
                writer.writerow([*key, repr(self.phi[key]), self.samples.get(key, 0)])

    @classmethod
    def from_csv(cls, path: str | Path) -> "EmpiricalCostTable":
        phi: dict[tuple[int, int, int], float] = {}
        samples: dict[tuple[int, int, int], int] = {}
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            for row in reader:
                key = (int(row["n_vms"]), int(row["bandwidth"]), int(row["compute"]))
                phi[key] = float(row["phi"])
                samples[key] = int(row["samples"])
        return cls(phi, samples)


@dataclass(frozen=True)
class VceSizeBenefit:
    """Benefit proportional to the expected embedding footprint.

    raw = (e_tot/v_tot) * (n_vms*compute / v_tot)^2 + (phi / e_tot)^2 with
    v_tot the total server compute capacity and e_tot the total edge
    bandwidth capacity; raw values over the generation domain are affinely
    scaled to integers in [1, scale_max].
    """

    table: EmpiricalCostTable
    v_tot: int
    e_tot: int
    raw_min: float
    raw_max: float
    scale_max: int = 1000

    @staticmethod
    def raw_value(n_vms: int, bandwidth: int, compute: int, table: EmpiricalCostTable,
                  v_tot: int, e_tot: int) -> float:
        phi = table.lookup(n_vms, bandwidth, compute)
        return (e_tot / v_tot) * (n_vms * compute / v_tot) ** 2 + (phi / e_tot) ** 2

    @classmethod
    def from_table(cls, table: EmpiricalCostTable, graph, node_cap: int | None = None,
                   edge_cap: int | None = None, scale_max: int = 1000) -> "VceSizeBenefit":
        v_tot = int(graph.node_caps.sum())
        e_tot = int(graph.edge_caps.sum())
        node_cap = graph.c_v if node_cap is None else node_cap
        edge_cap = graph.c_e if edge_cap is None else edge_cap
        raws = [
            cls.raw_value(n, b, c, table, v_tot, e_tot)
            for n, b, c in generation_domain(node_cap, edge_cap)
        ]
        return cls(table, v_tot, e_tot, min(raws), max(raws), scale_max)

    def benefit(self, i, n_vms, bandwidth, compute, rng) -> int:
        raw = self.raw_value(n_vms, bandwidth, compute, self.table, self.v_tot, self.e_tot)
        if self.raw_max <= self.raw_min:
            return 1
        scaled = 1 + (raw - self.raw_min) * (self.scale_max - 1) / (self.raw_max - self.raw_min)
        return min(self.scale_max, max(1, round_half_up(scaled)))


BenefitPattern = RandomBenefit | ReqSizeBenefit | WaveBenefit | PeakBenefit | VceSizeBenefit


def generation_domain(node_cap: int, edge_cap: int):
    """All (n_vms, bandwidth, compute) triples the generator can emit."""
    b_lo, b_hi = round_half_up(0.2 * edge_cap), round_half_up(0.6 * edge_cap)
    c_lo, c_hi = round_half_up(0.2 * node_cap), round_half_up(1.0 * node_cap)
    for n in range(3, 15):
        for b in range(b_lo, b_hi + 1):
            for c in range(c_lo, c_hi + 1):
                yield n, b, c


def generate_sequence(
    seed,
    length: int,
    pattern: BenefitPattern,
    node_cap: int = 20,
    edge_cap: int = 20,
) -> list[VCRequest]:
    """Seeded online request sequence; pure in (seed, length, pattern, caps)."""
    if length < 1:
        raise ValueError("sequence length must be >= 1")
    rng = np.random.default_rng(seed)
    requests = []
    for i in range(1, length + 1):
        n_vms = int(rng.integers(3, 15))
        bandwidth = round_half_up(rng.uniform(0.2, 0.6) * edge_cap)
        compute = round_half_up(rng.uniform(0.2, 1.0) * node_cap)
        benefit = pattern.benefit(i, n_vms, bandwidth, compute, rng)
        requests.append(VCRequest(i, n_vms, bandwidth, compute, benefit))
    return requests


def build_empirical_cost_table(
    seed,
    num_experiments: int,
    requests_per_experiment: int,
    graph,
) -> EmpiricalCostTable:
    """Observe greedy embeddings to estimate phi per request triple.

    Runs the greedy admission policy (residual capacities, unit costs) over
    `num_experiments` independent sequences; every accepted request
    contributes one sample of its total allocated edge bandwidth, requests
    without a valid embedding are skipped. Experiments are merged in index
    order, so the result is deterministic in the seed.
    """
    from vcesim.oracle import CapacityView, CostVector, find_min_cost_embedding

    totals: dict[tuple[int, int, int], float] = {}
    counts: dict[tuple[int, int, int], int] = {}
    unit = CostVector.unit(graph)
    for j in range(num_experiments):
        sequence = generate_sequence(
            (seed, j), requests_per_experiment, RandomBenefit(),
            node_cap=graph.c_v, edge_cap=graph.c_e,
        )
        node_load = np.zeros(graph.num_nodes, dtype=np.int64)
        edge_load = np.zeros(graph.num_edges, dtype=np.int64)
        for req in sequence:
            view = CapacityView.residual(node_load, edge_load)
            emb = find_min_cost_embedding(graph, req, unit, view)
            if emb is None:
                continue
            key = (req.n_vms, req.bandwidth, req.compute)
            totals[key] = totals.get(key, 0.0) + emb.total_edge_load()
            counts[key] = counts.get(key, 0) + 1
            for v, cnt in emb.vm_count.items():
                node_load[v] += cnt * req.compute
            for e, load in emb.edge_load.items():
                edge_load[e] += load
    phi = {key: totals[key] / counts[key] for key in totals}
    return EmpiricalCostTable(phi, counts)


def write_sequence_csv(path: str | Path, requests: list[VCRequest]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "n_vms", "bandwidth", "compute", "benefit"])
        for r in requests:
            writer.writerow([r.index, r.n_vms, r.bandwidth, r.compute, r.benefit])


def read_sequence_csv(path: str | Path) -> list[VCRequest]:
    requests = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            requests.append(
                VCRequest(
                    int(row["index"]), int(row["n_vms"]), int(row["bandwidth"]),
                    int(row["compute"]), int(row["benefit"]),
                )
            )
    return requests

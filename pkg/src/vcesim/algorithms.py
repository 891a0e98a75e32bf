"""Online admission policies: greedy, COVCE, COVCEload and GVOP.

All four process one request at a time against shared mutable state. The
competitive policies keep primal variables (per-resource costs x, per-request
slack z) and the dual objective (accepted benefit) in sync with the packing
LP they embody: on acceptance z is set to benefit - cost so the request's
primal constraint holds with equality, and every x entry only ever grows.

COVCE recomputes x entries from total loads through a closed-form exponential
cost curve parameterized by the running benefit bound alpha; GVOP instead
applies a stateful multiplicative update. Greedy and COVCEload hand the
embedding oracle residual capacities and therefore never violate them, while
COVCE and GVOP always embed against the initial capacities and pay for it
with bounded capacity violations.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from vcesim import metrics
from vcesim.oracle import CapacityView, CostVector, Embedding, find_min_cost_embedding
from vcesim.substrate import SubstrateGraph
from vcesim.workload import VCRequest

__all__ = [
    "Decision",
    "StepRecord",
    "PrimalDualState",
    "RunResult",
    "ALGORITHMS",
    "covce_cost",
    "covce_process",
    "covceload_process",
    "gvop_process",
    "greedy_process",
    "run_sequence",
    "check_step_ratio",
    "write_decision_csv",
]


class Decision(Enum):
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    INVALID = "invalid"


@dataclass
class StepRecord:
    """Outcome of processing one request.

    `d_primal` and `d_dual` are the objective deltas of the admission step,
    measured after any alpha recalculation. `d_primal_diff` is the
    derivative-form primal growth ln(1+q*alpha) * sum(l*(x_pre + 1/q)) per
    resource class plus z, which is the quantity the COVCE competitive-ratio
    argument bounds (the raw objective jump is not bounded by it: a resource
    filling up moves its cost from near 0 to alpha in one step)."""

    index: int
    algorithm: str
    decision: Decision
    benefit: int
    embedding: Embedding | None
    z: float | None
    alpha: float | None
    d_primal: float
    d_dual: int
    d_primal_diff: float | None = None


def covce_cost(load, cap, alpha, c_res, size_g):
    """Closed-form COVCE resource cost for a given total load.

    Evaluates (exp(ln(1 + size_g*c_res*alpha)/cap * load) - 1)/(size_g*c_res);
    0 at zero load, exactly alpha at full load. Works elementwise on arrays.
    Saturates to inf for loads far beyond capacity, which keeps the ordering.
    """
    q = size_g * c_res
    with np.errstate(over="ignore"):
        return np.expm1(np.log1p(q * alpha) / cap * load) / q


class PrimalDualState:
    """Mutable per-run state shared by the admission policies.

    `oracle_returned` keeps every embedding the oracle handed back (accepted
    or rejected) so primal feasibility can be re-checked against the final
    cost vector.
    """

    def __init__(self, graph: SubstrateGraph, fixed_alpha: float | None = None):
        self.graph = graph
        self.node_load = np.zeros(graph.num_nodes, dtype=np.int64)
        self.edge_load = np.zeros(graph.num_edges, dtype=np.int64)
        self.x_node = np.zeros(graph.num_nodes, dtype=np.float64)
        self.x_edge = np.zeros(graph.num_edges, dtype=np.float64)
        self.fixed_alpha = None if fixed_alpha is None else float(fixed_alpha)
        self.alpha = 1.0 if fixed_alpha is None else float(fixed_alpha)
        if self.alpha < 1.0:
            raise ValueError("alpha must be >= 1")
        self.z: dict[int, float] = {}
        self.z_sum = 0.0
        self.accepted: dict[int, Embedding] = {}
        self.oracle_returned: dict[int, tuple[VCRequest, Embedding]] = {}
        self.cum_profit = 0
        self.max_benefit_seen = 0
        self.max_accepted_w = 0
        self._unit_costs = CostVector.unit(graph)

    @property
    def primal_cost(self) -> float:
        return (
            float(self.graph.edge_caps @ self.x_edge)
            + float(self.graph.node_caps @ self.x_node)
            + self.z_sum
        )

    def cost_vector(self) -> CostVector:
        return CostVector(self.x_node, self.x_edge)

    def residual_view(self) -> CapacityView:
        return CapacityView.residual(self.node_load, self.edge_load)

    def apply_loads(self, request: VCRequest, embedding: Embedding) -> None:
        for v, cnt in embedding.vm_count.items():
            self.node_load[v] += cnt * request.compute
        for e, load in embedding.edge_load.items():
            self.edge_load[e] += load

    def recompute_covce_costs(self) -> None:
        """Refresh every x entry from current loads and alpha (closed form)."""
        g = self.graph
        servers = g.server_ids
        if g.num_edges:
            self.x_edge[:] = covce_cost(self.edge_load, g.edge_caps, self.alpha, g.c_e, g.size_g)
        self.x_node[servers] = covce_cost(
            self.node_load[servers], g.node_caps[servers], self.alpha, g.c_v, g.size_g
        )


def _admit(
    state: PrimalDualState,
    graph: SubstrateGraph,
    request: VCRequest,
    algorithm: str,
    view: CapacityView,
    on_accept,
    track_alpha: bool,
    method: str,
) -> StepRecord:
    """Common oracle-call / accept-test skeleton for the primal-dual policies."""
    b = request.benefit
    p_before = state.primal_cost
    embedding = find_min_cost_embedding(graph, request, state.cost_vector(), view, method)
    alpha = state.alpha if track_alpha else None
    if embedding is None:
        state.z[request.index] = 0.0
        return StepRecord(request.index, algorithm, Decision.INVALID, b, None, 0.0, alpha, 0.0, 0)
    state.oracle_returned[request.index] = (request, embedding)
    if embedding.cost < b:
        z = b - embedding.cost
        state.z[request.index] = z
        state.z_sum += z
        state.accepted[request.index] = embedding
        state.cum_profit += b
        state.apply_loads(request, embedding)
        d_diff = on_accept(embedding)
        if d_diff is not None:
            d_diff += z
        d_primal = state.primal_cost - p_before
        return StepRecord(
            request.index, algorithm, Decision.ACCEPTED, b, embedding, z, alpha,
            d_primal, b, d_diff,
        )
    state.z[request.index] = 0.0
    return StepRecord(
        request.index, algorithm, Decision.REJECTED, b, embedding, 0.0, alpha, 0.0, 0
    )


def covce_process(
    state: PrimalDualState,
    graph: SubstrateGraph,
    request: VCRequest,
    method: str = "dijkstra",
    _residual: bool = False,
) -> StepRecord:
    """One COVCE step: raise alpha if the benefit exceeds it (recomputing all
    costs), ask the oracle against initial capacities, accept iff the
    embedding is cheaper than the benefit."""
    b = request.benefit
    state.max_benefit_seen = max(state.max_benefit_seen, b)
    if state.fixed_alpha is None and b > state.alpha:
        state.alpha = float(b)
        state.recompute_covce_costs()
    view = state.residual_view() if _residual else CapacityView.initial()

    def on_accept(embedding: Embedding) -> float:
        g = state.graph
        q_e = g.size_g * g.c_e
        q_v = g.size_g * g.c_v
        diff_edges = 0.0
        diff_nodes = 0.0
        for e, load in embedding.edge_load.items():
            diff_edges += load * (float(state.x_edge[e]) + 1.0 / q_e)
            state.x_edge[e] = float(
                covce_cost(state.edge_load[e], g.edge_caps[e], state.alpha, g.c_e, g.size_g)
            )
        for v, cnt in embedding.vm_count.items():
            diff_nodes += cnt * request.compute * (float(state.x_node[v]) + 1.0 / q_v)
            state.x_node[v] = float(
                covce_cost(state.node_load[v], g.node_caps[v], state.alpha, g.c_v, g.size_g)
            )
        d_diff = 0.0
        if q_e:
            d_diff += math.log1p(q_e * state.alpha) * diff_edges
        d_diff += math.log1p(q_v * state.alpha) * diff_nodes
        return d_diff

    name = "covceload" if _residual else "covce"
    return _admit(state, graph, request, name, view, on_accept, True, method)


def covceload_process(
    state: PrimalDualState,
    graph: SubstrateGraph,
    request: VCRequest,
    method: str = "dijkstra",
) -> StepRecord:
    """COVCE against residual capacities: same admission test and cost
    bookkeeping, but the oracle can never oversubscribe a resource."""
    return covce_process(state, graph, request, method, _residual=True)


def gvop_process(
    state: PrimalDualState,
    graph: SubstrateGraph,
    request: VCRequest,
    method: str = "dijkstra",
) -> StepRecord:
    """One GVOP step: no alpha handling; on acceptance each touched resource
    cost is multiplied by 2^(load/cap) plus a 1/w normalized increment."""
    state.max_benefit_seen = max(state.max_benefit_seen, request.benefit)

    def on_accept(embedding: Embedding) -> None:
        g = state.graph
        w_e = embedding.total_edge_load()
        w_v = request.n_vms * request.compute
        state.max_accepted_w = max(state.max_accepted_w, w_e + w_v)
        for e, load in embedding.edge_load.items():
            factor = 2.0 ** (load / g.edge_caps[e])
            state.x_edge[e] = state.x_edge[e] * factor + (factor - 1.0) / w_e
        for v, cnt in embedding.vm_count.items():
            load = cnt * request.compute
            factor = 2.0 ** (load / g.node_caps[v])
            state.x_node[v] = state.x_node[v] * factor + (factor - 1.0) / w_v

    return _admit(state, graph, request, "gvop", CapacityView.initial(), on_accept, False, method)


def greedy_process(
    state: PrimalDualState,
    graph: SubstrateGraph,
    request: VCRequest,
    method: str = "dijkstra",
) -> StepRecord:
    """Greedy admission: embed against residual capacities with unit costs,
    accept whenever any valid embedding exists."""
    b = request.benefit
    state.max_benefit_seen = max(state.max_benefit_seen, b)
    embedding = find_min_cost_embedding(
        graph, request, state._unit_costs, state.residual_view(), method
    )
    if embedding is None:
        return StepRecord(request.index, "greedy", Decision.INVALID, b, None, None, None, 0.0, 0)
    state.oracle_returned[request.index] = (request, embedding)
    state.accepted[request.index] = embedding
    state.cum_profit += b
    state.apply_loads(request, embedding)
    return StepRecord(request.index, "greedy", Decision.ACCEPTED, b, embedding, None, None, 0.0, b)


ALGORITHMS = {
    "greedy": greedy_process,
    "covce": covce_process,
    "covceload": covceload_process,
    "gvop": gvop_process,
}


@dataclass
class RunResult:
    algorithm: str
    records: list[StepRecord]
    state: PrimalDualState
    series: "metrics.MetricsSeries"

    @property
    def fixed_alpha_exceeded(self) -> bool:
        return (
            self.state.fixed_alpha is not None
            and self.state.max_benefit_seen > self.state.fixed_alpha
        )


def run_sequence(
    algorithm: str,
    graph: SubstrateGraph,
    requests: list[VCRequest],
    fixed_alpha: float | None = None,
    window_width: int = 100,
    method: str = "dijkstra",
) -> RunResult:
    """Process a request sequence strictly in order, collecting per-step
    decisions and the metric series."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    process = ALGORITHMS[algorithm]
    state = PrimalDualState(graph, fixed_alpha if algorithm in ("covce", "covceload") else None)
    records: list[StepRecord] = []
    n = len(requests)
    violation = np.empty(n)
    avg_violation = np.empty(n)
    cum_profit = np.empty(n, dtype=np.int64)
    for pos, request in enumerate(requests):
        records.append(process(state, graph, request, method))
        violation[pos] = metrics.violation(
            state.node_load, state.edge_load, graph.node_caps, graph.edge_caps
        )
        avg_violation[pos] = metrics.avg_violation(
            state.node_load, state.edge_load, graph.node_caps, graph.edge_caps
        )
        cum_profit[pos] = state.cum_profit
    series = metrics.MetricsSeries(
        violation=violation,
        avg_violation=avg_violation,
        cum_profit=cum_profit,
        relative_profit=cum_profit / violation,
        avg_relative_profit=cum_profit / avg_violation,
        acceptance_windows=np.array(
            metrics.acceptance_ratio_windows(
                [r.decision is Decision.ACCEPTED for r in records], window_width
            )
        ),
        window_width=window_width,
    )
    return RunResult(algorithm, records, state, series)


def check_step_ratio(record: StepRecord, graph: SubstrateGraph, rel_tol: float = 1e-9) -> bool:
    """Per-step competitive bound for COVCE records.

    On acceptance the derivative-form primal growth is at most
    (4 ln(1 + |G|*C_max*alpha) + 1) * benefit while the dual objective grows
    by exactly the benefit; rejected and invalid requests change nothing.
    """
    if record.alpha is None:
        raise ValueError("step ratio check applies to COVCE-style records")
    if record.decision is Decision.ACCEPTED:
        bound = (4.0 * math.log1p(graph.size_g * graph.c_max * record.alpha) + 1.0) * record.benefit
        return (
            record.d_primal_diff is not None
            and record.d_primal_diff <= bound * (1.0 + rel_tol)
            and record.d_dual == record.benefit
        )
    return abs(record.d_primal) <= rel_tol and record.d_dual == 0


def write_decision_csv(path: str | Path, records: list[StepRecord]) -> None:
    """Decision log with the documented column set."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["index", "algorithm", "decision", "benefit", "embedding_cost", "z", "alpha",
             "edges_touched", "nodes_touched"]
        )
        for r in records:
            writer.writerow(
                [
                    r.index,
                    r.algorithm,
                    r.decision.value,
                    r.benefit,
                    repr(r.embedding.cost) if r.embedding is not None else "",
                    repr(r.z) if r.z is not None else "",
                    repr(r.alpha) if r.alpha is not None else "",
                    len(r.embedding.edge_load) if r.embedding is not None else 0,
                    len(r.embedding.vm_count) if r.embedding is not None else 0,
                ]
            )


def read_decision_csv(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))

"""Exponential-time ground truth for tiny instances.

`enumerate_min_cost_embedding` searches every logical-switch placement, VM
distribution and simple-path assignment directly, independent of the flow
solver, and is the reference the oracle is cross-checked against.
`optimal_offline_profit` finds the benefit-maximizing subset of requests that
can be embedded simultaneously. Both refuse instances beyond configurable
limits instead of silently taking forever.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from vcesim.oracle import CapacityView, CostVector, Embedding
from vcesim.substrate import SubstrateGraph, build_custom
from vcesim.workload import VCRequest

__all__ = [
    "EnumerationLimits",
    "LimitExceeded",
    "enumerate_min_cost_embedding",
    "optimal_offline_profit",
    "random_tiny_instance",
    "random_costs",
    "run_verification",
]


@dataclass(frozen=True)
class EnumerationLimits:
    max_nodes: int = 10
    max_requests: int = 8
    max_paths_per_pair: int = 5000
    max_states: int = 5_000_000


class LimitExceeded(RuntimeError):
    pass


def _simple_paths(
    graph: SubstrateGraph, src: int, dst: int, limit: int
) -> list[list[int]]:
    """All simple paths src -> dst as edge-id lists, in DFS order."""
    if src == dst:
        return [[]]
    paths: list[list[int]] = []
    visited = [False] * graph.num_nodes
    visited[src] = True
    path: list[int] = []

    def walk(node: int) -> None:
        for eid in sorted(graph.adjacency[node]):
            nxt = graph.other_end(eid, node)
            if visited[nxt]:
                continue
            path.append(eid)
            if nxt == dst:
                paths.append(list(path))
                if len(paths) > limit:
                    raise LimitExceeded(f"more than {limit} simple paths {src}->{dst}")
            else:
                visited[nxt] = True
                walk(nxt)
                visited[nxt] = False
            path.pop()

    walk(src)
    return paths


def _distributions(servers: list[int], slots: dict[int, int], n_vms: int):
    """All ways to spread n_vms over the servers within their slot limits."""
    out: list[list[tuple[int, int]]] = []
    chosen: list[tuple[int, int]] = []

    def rec(i: int, remaining: int) -> None:
        if remaining == 0:
            out.append(list(chosen))
            return
        if i == len(servers):
            return
        v = servers[i]
        for cnt in range(min(slots[v], remaining), -1, -1):
            if cnt:
                chosen.append((v, cnt))
            rec(i + 1, remaining - cnt)
            if cnt:
                chosen.pop()

    rec(0, n_vms)
    return out


def enumerate_min_cost_embedding(
    graph: SubstrateGraph,
    request: VCRequest,
    costs: CostVector,
    view: CapacityView,
    limits: EnumerationLimits | None = None,
) -> Embedding | None:
    """Exact minimum-cost embedding by exhaustive enumeration."""
    limits = limits or EnumerationLimits()
    if graph.num_nodes > limits.max_nodes:
        raise LimitExceeded(f"{graph.num_nodes} nodes exceed limit {limits.max_nodes}")
    eff_node = view.effective_node(graph)
    eff_edge = view.effective_edge(graph)
    n_vms, bandwidth, compute = request.n_vms, request.bandwidth, request.compute
    servers = [int(v) for v in graph.server_ids]
    slots = {v: int(eff_node[v]) // compute for v in servers}

    best_cost = math.inf
    best: Embedding | None = None
    states = 0

    for target in range(graph.num_nodes):
        path_cache: dict[int, list[tuple[list[int], float]]] = {}

        def paths_from(host: int) -> list[tuple[list[int], float]]:
            if host not in path_cache:
                raw = _simple_paths(graph, host, target, limits.max_paths_per_pair)
                path_cache[host] = [
                    (p, sum(bandwidth * float(costs.edge[e]) for e in p)) for p in raw
                ]
            return path_cache[host]

        for groups in _distributions(servers, slots, n_vms):
            node_cost = sum(cnt * compute * float(costs.node[v]) for v, cnt in groups)
            if node_cost >= best_cost:
                continue
            edge_used: dict[int, int] = {}
            chosen_paths: list[tuple[int, list[int]]] = []

            def assign(gi: int, cost_so_far: float) -> None:
                nonlocal best_cost, best, states
                states += 1
                if states > limits.max_states:
                    raise LimitExceeded("enumeration state limit reached")
                if cost_so_far >= best_cost:
                    return
                if gi == len(groups):
                    load = {e: u * bandwidth for e, u in edge_used.items() if u}
                    units = _signed_units(graph, chosen_paths)
                    best_cost = cost_so_far
                    best = Embedding(
                        target,
                        {v: c for v, c in groups},
                        load,
                        cost_so_far,
                        units,
                    )
                    return
                host, cnt = groups[gi]
                plist = paths_from(host)
                for combo in combinations_with_replacement(range(len(plist)), cnt):
                    delta: dict[int, int] = {}
                    add_cost = 0.0
                    ok = True
                    for pi in combo:
                        path, pcost = plist[pi]
                        add_cost += pcost
                        for e in path:
                            delta[e] = delta.get(e, 0) + 1
                    for e, units in delta.items():
                        if (edge_used.get(e, 0) + units) * bandwidth > eff_edge[e]:
                            ok = False
                            break
                    if not ok:
                        continue
                    for e, units in delta.items():
                        edge_used[e] = edge_used.get(e, 0) + units
                    for pi in combo:
                        chosen_paths.append((host, plist[pi][0]))
                    assign(gi + 1, cost_so_far + add_cost)
                    for pi in combo:
                        chosen_paths.pop()
                    for e, units in delta.items():
                        edge_used[e] -= units

            assign(0, node_cost)
    return best


def _signed_units(
    graph: SubstrateGraph, host_paths: list[tuple[int, list[int]]]
) -> dict[int, int]:
    """Net path units per edge, oriented by walking each path from its host."""
    units: dict[int, int] = {}
    for host, path in host_paths:
        node = host
        for e in path:
            edge = graph.edges[e]
            if edge.u == node:
                units[e] = units.get(e, 0) + 1
                node = edge.v
            else:
                units[e] = units.get(e, 0) - 1
                node = edge.u
    return {e: u for e, u in units.items() if u != 0}


def _iter_feasible(
    graph: SubstrateGraph,
    request: VCRequest,
    node_used: np.ndarray,
    edge_used: np.ndarray,
    limits: EnumerationLimits,
    budget: list[int],
):
    """Yield (vm_count, edge_load) of every capacity-respecting embedding."""
    n_vms, bandwidth, compute = request.n_vms, request.bandwidth, request.compute
    servers = [int(v) for v in graph.server_ids]
    slots = {
        v: int(graph.node_caps[v] - node_used[v]) // compute for v in servers
    }
    for target in range(graph.num_nodes):
        path_cache: dict[int, list[list[int]]] = {}
        for groups in _distributions(servers, slots, n_vms):
            stack_paths: dict[int, int] = {}

            def assign(gi: int):
                budget[0] += 1
                if budget[0] > limits.max_states:
                    raise LimitExceeded("offline search state limit reached")
                if gi == len(groups):
                    yield (
                        {v: c for v, c in groups},
                        {e: u * bandwidth for e, u in stack_paths.items() if u},
                    )
                    return
                host, cnt = groups[gi]
                if host not in path_cache:
                    path_cache[host] = _simple_paths(
                        graph, host, target, limits.max_paths_per_pair
                    )
                plist = path_cache[host]
                for combo in combinations_with_replacement(range(len(plist)), cnt):
                    delta: dict[int, int] = {}
                    ok = True
                    for pi in combo:
                        for e in plist[pi]:
                            delta[e] = delta.get(e, 0) + 1
                    for e, units in delta.items():
                        total = (stack_paths.get(e, 0) + units) * bandwidth
                        if total > graph.edge_caps[e] - edge_used[e]:
                            ok = False
                            break
                    if not ok:
                        continue
                    for e, units in delta.items():
                        stack_paths[e] = stack_paths.get(e, 0) + units
                    yield from assign(gi + 1)
                    for e, units in delta.items():
                        stack_paths[e] -= units

            yield from assign(0)


def optimal_offline_profit(
    graph: SubstrateGraph,
    requests: list[VCRequest],
    limits: EnumerationLimits | None = None,
) -> int:
    """Maximum total benefit over subsets of requests that admit simultaneous
    valid embeddings (each chosen request embedded whole, exactly once)."""
    limits = limits or EnumerationLimits()
    if graph.num_nodes > limits.max_nodes:
        raise LimitExceeded(f"{graph.num_nodes} nodes exceed limit {limits.max_nodes}")
    if len(requests) > limits.max_requests:
        raise LimitExceeded(f"{len(requests)} requests exceed limit {limits.max_requests}")
    node_used = np.zeros(graph.num_nodes, dtype=np.int64)
    edge_used = np.zeros(graph.num_edges, dtype=np.int64)
    suffix = [0] * (len(requests) + 1)
    for i in range(len(requests) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + requests[i].benefit
    best = 0
    budget = [0]

    def rec(i: int, current: int) -> None:
        nonlocal best
        if current + suffix[i] <= best:
            return
        if i == len(requests):
            best = max(best, current)
            return
        request = requests[i]
        for vm_count, edge_load in _iter_feasible(
            graph, request, node_used, edge_used, limits, budget
        ):
            for v, cnt in vm_count.items():
                node_used[v] += cnt * request.compute
            for e, load in edge_load.items():
                edge_used[e] += load
            rec(i + 1, current + request.benefit)
            for v, cnt in vm_count.items():
                node_used[v] -= cnt * request.compute
            for e, load in edge_load.items():
                edge_used[e] -= load
        rec(i + 1, current)

    rec(0, 0)
    return best


# ---------------------------------------------------------------------------
# Random tiny instances and the self-check suite
# ---------------------------------------------------------------------------


def random_tiny_instance(
    rng: np.random.Generator,
    max_nodes: int = 8,
    max_requests: int = 5,
) -> tuple[SubstrateGraph, list[VCRequest]]:
    """Small random connected substrate plus a short request list."""
    n_servers = int(rng.integers(2, 5))
    n_switches = int(rng.integers(0, max(1, max_nodes - n_servers - 1) + 1))
    kinds = ["server"] * n_servers + ["switch"] * n_switches
    rng.shuffle(kinds)
    node_specs = [
        (kind, int(rng.integers(3, 11)) if kind == "server" else 0) for kind in kinds
    ]
    n = len(node_specs)
    edge_specs: list[tuple[int, int, int]] = []
    pairs = set()
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edge_specs.append((u, v, int(rng.integers(2, 11))))
        pairs.add((u, v))
    for _ in range(int(rng.integers(0, 3))):
        u = int(rng.integers(0, n))
        v = int(rng.integers(0, n))
        key = (min(u, v), max(u, v))
        if u != v and key not in pairs:
            pairs.add(key)
            edge_specs.append((key[0], key[1], int(rng.integers(2, 11))))
    graph = build_custom(node_specs, edge_specs)
    requests = [
        VCRequest(
            i + 1,
            int(rng.integers(1, 4)),
            int(rng.integers(1, 4)),
            int(rng.integers(1, 4)),
            int(rng.integers(1, 51)),
        )
        for i in range(int(rng.integers(1, max_requests + 1)))
    ]
    return graph, requests


def random_costs(rng: np.random.Generator, graph: SubstrateGraph) -> CostVector:
    return CostVector(
        np.round(rng.uniform(0.0, 3.0, graph.num_nodes), 3),
        np.round(rng.uniform(0.0, 3.0, graph.num_edges), 3),
    )


def run_verification(instances: int = 30, seed: int = 7, echo=print) -> bool:
    """Tiny-instance invariant suite used by the `verify` CLI subcommand."""
    from vcesim.algorithms import Decision, check_step_ratio, run_sequence
    from vcesim.oracle import find_min_cost_embedding, validate_embedding

    rng = np.random.default_rng(seed)
    ok = True

    def check(name: str, passed: bool, detail: str = "") -> None:
        nonlocal ok
        ok = ok and passed
        echo(f"{'PASS' if passed else 'FAIL'} {name}{': ' + detail if detail else ''}")

    oracle_ok = bellman_ok = covce_ok = sandwich_ok = True
    for _ in range(instances):
        graph, requests = random_tiny_instance(rng)
        costs = random_costs(rng, graph)
        request = requests[0]
        view = CapacityView.initial()
        fast = find_min_cost_embedding(graph, request, costs, view)
        exact = enumerate_min_cost_embedding(graph, request, costs, view)
        if (fast is None) != (exact is None):
            oracle_ok = False
        elif fast is not None:
            validate_embedding(graph, request, costs, view, fast)
            if not math.isclose(fast.cost, exact.cost, rel_tol=1e-9, abs_tol=1e-9):
                oracle_ok = False
            reference = find_min_cost_embedding(graph, request, costs, view, "bellman_ford")
            if not math.isclose(fast.cost, reference.cost, rel_tol=1e-9, abs_tol=1e-9):
                bellman_ok = False
        result = run_sequence("covce", graph, requests)
        for record in result.records:
            if not check_step_ratio(record, graph):
                covce_ok = False
        caps = np.concatenate([graph.node_caps[graph.server_ids], graph.edge_caps])
        loads = np.concatenate(
            [result.state.node_load[graph.server_ids], result.state.edge_load]
        )
        if (loads > 2 * caps).any():
            covce_ok = False
        opt = optimal_offline_profit(graph, requests)
        if opt > result.state.primal_cost * (1 + 1e-9):
            sandwich_ok = False
        if result.state.cum_profit > 0:
            beta = 4 * math.log1p(graph.size_g * graph.c_max * result.state.alpha) + 1
            if opt > beta * result.state.cum_profit * (1 + 1e-9):
                sandwich_ok = False
    check("oracle matches exhaustive enumeration", oracle_ok)
    check("dijkstra SSP matches bellman-ford SSP", bellman_ok)
    check("covce per-step bounds and 2x capacity hold", covce_ok)
    check("offline optimum below covce primal cost", sandwich_ok)
    return ok

"""Minimum-cost virtual cluster embedding via successive shortest paths.

A request (n_vms VMs, each needing `compute` units, star-connected to a
logical switch with per-link `bandwidth`) is embedded by solving one
single-commodity min-cost flow problem per candidate logical-switch node and
keeping the cheapest result. One flow unit corresponds to one VM:

* a super source connects to every server v that can still host at least one
  VM, with arc capacity floor(effective_cap(v) / compute) and per-unit cost
  compute * x_node(v);
* every undirected substrate edge e becomes two opposing arcs, each with
  capacity floor(effective_cap(e) / bandwidth) and per-unit cost
  bandwidth * x_edge(e);
* the candidate target node demands n_vms units. Units sourced at a server
  target are absorbed at zero edge cost (collocated VMs use empty paths).

Shortest augmenting paths are found by Dijkstra over reduced costs with node
potentials and early termination: the search stops once the target settles,
settled nodes get their distance added to their potential and all remaining
nodes get the target distance, which keeps residual reduced costs
nonnegative. A Bellman-Ford based variant of the same machinery serves as an
independent reference solver.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from vcesim.substrate import SubstrateGraph
from vcesim.workload import VCRequest

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


__all__ = [
    "CostVector",
    "CapacityView",
    "Embedding",
    "find_min_cost_embedding",
    "solve_flow_for_target",
    "decompose_paths",
    "validate_embedding",
]


@dataclass(frozen=True)
class CostVector:
    """Per-resource nonnegative costs x(v), x(e) used by the flow oracle."""

    node: np.ndarray
    edge: np.ndarray

    def __post_init__(self):
        for arr in (self.node, self.edge):
            if arr.size and (not np.all(np.isfinite(arr)) or arr.min() < 0):
                raise ValueError("costs must be finite and nonnegative")

    @staticmethod
    def zeros(graph: SubstrateGraph) -> "CostVector":
        return CostVector(
            np.zeros(graph.num_nodes, dtype=np.float64),
            np.zeros(graph.num_edges, dtype=np.float64),
        )

    @staticmethod
    def unit(graph: SubstrateGraph) -> "CostVector":
        return CostVector(
            np.ones(graph.num_nodes, dtype=np.float64),
            np.ones(graph.num_edges, dtype=np.float64),
        )


@dataclass(frozen=True)
class CapacityView:
    """Initial capacities, or residual capacities after subtracting loads."""

    node_load: np.ndarray | None = None
    edge_load: np.ndarray | None = None

    @staticmethod
    def initial() -> "CapacityView":
        return CapacityView()

    @staticmethod
    def residual(node_load: np.ndarray, edge_load: np.ndarray) -> "CapacityView":
        return CapacityView(node_load, edge_load)

    def effective_node(self, graph: SubstrateGraph) -> np.ndarray:
        if self.node_load is None:
            return graph.node_caps
        eff = graph.node_caps - self.node_load
        if eff.min() < 0:
            raise ValueError("residual node capacity below zero")
        return eff

    def effective_edge(self, graph: SubstrateGraph) -> np.ndarray:
        if self.edge_load is None:
            return graph.edge_caps
        eff = graph.edge_caps - self.edge_load
        if eff.size and eff.min() < 0:
            raise ValueError("residual edge capacity below zero")
        return eff


@dataclass
class Embedding:
    """One valid virtual cluster embedding.

    `vm_count` maps server id -> VMs hosted there, `edge_load` maps edge id ->
    allocated bandwidth units, `edge_units` keeps the signed path-unit count
    per edge (positive in the stored u->v direction) so the flow can be
    decomposed into per-VM paths. `cost` is the eq.-(1)-style total
    sum(edge_load * x_edge) + sum(vm_count * compute * x_node).
    """

    ls_node: int
    vm_count: dict[int, int]
    edge_load: dict[int, int]
    cost: float
    edge_units: dict[int, int] = field(default_factory=dict, repr=False, compare=False)

    @property
    def node_load(self) -> dict[int, int]:
        raise AttributeError("use vm_count and the request's compute demand")

    def node_alloc(self, compute: int) -> dict[int, int]:
        return {v: c * compute for v, c in self.vm_count.items()}

    def total_edge_load(self) -> int:
        return sum(self.edge_load.values())

    def dump_csv(self) -> str:
        """Debug dump as `kind,id,amount` rows."""
        rows = ["kind,id,amount", f"ls,{self.ls_node},0"]
        rows += [f"node,{v},{c}" for v, c in sorted(self.vm_count.items())]
        rows += [f"edge,{e},{l}" for e, l in sorted(self.edge_load.items())]
        return "\n".join(rows) + "\n"


def _check_request(request: VCRequest) -> None:
    if request.n_vms < 1 or request.bandwidth < 1 or request.compute < 1:
        raise ValueError(f"malformed request {request}")


# ---------------------------------------------------------------------------
# Flow network construction
# ---------------------------------------------------------------------------


class _FlowProblem:
    """Arc arrays for the unit-VM flow network, shared across all targets.

    Arc pairing convention: arc a and a^1 are mutual reverses; even arcs are
    the original ones carrying the positive cost.
    """

    def __init__(
        self,
        graph: SubstrateGraph,
        request: VCRequest,
        costs: CostVector,
        view: CapacityView,
    ):
        _check_request(request)
        self.graph = graph
        self.request = request
        self.costs = costs
        self.source = graph.num_nodes
        n_flow_nodes = graph.num_nodes + 1

        eff_node = view.effective_node(graph)
        eff_edge = view.effective_edge(graph)
        compute = request.compute
        bandwidth = request.bandwidth

        slots = eff_node[graph.server_ids] // compute
        src_active = slots >= 1
        self.src_servers = graph.server_ids[src_active]
        src_slots = slots[src_active]
        self.total_slots = int(src_slots.sum())

        units = eff_edge // bandwidth if graph.num_edges else np.zeros(0, dtype=np.int64)
        edge_active = units >= 1
        self.active_edges = np.nonzero(edge_active)[0]
        edge_units = units[edge_active]
        eu = graph.edge_u[edge_active]
        ev = graph.edge_v[edge_active]
        edge_cost = bandwidth * costs.edge[edge_active]

        n_src = len(self.src_servers)
        self.n_src = n_src
        self.n_active_edges = len(self.active_edges)
        # pair layout: source arcs, then u->v and v->u arcs per active edge;
        # arc 2i is pair i's forward arc, arc 2i+1 its reverse
        pair_tail = np.concatenate(
            [np.full(n_src, self.source, dtype=np.int64), eu, ev]
        )
        pair_head = np.concatenate([self.src_servers, ev, eu])
        pair_cap = np.concatenate([src_slots, edge_units, edge_units])
        pair_cost = np.concatenate(
            [compute * costs.node[self.src_servers], edge_cost, edge_cost]
        )

        n_pairs = len(pair_tail)
        n_arcs = 2 * n_pairs
        self.arc_to = np.empty(n_arcs, dtype=np.int64)
        self.arc_to[0::2] = pair_head
        self.arc_to[1::2] = pair_tail
        self.arc_cap = np.zeros(n_arcs, dtype=np.int64)
        self.arc_cap[0::2] = pair_cap
        self.arc_cost = np.empty(n_arcs, dtype=np.float64)
        self.arc_cost[0::2] = pair_cost
        self.arc_cost[1::2] = -pair_cost

        arc_tail = np.empty(n_arcs, dtype=np.int64)
        arc_tail[0::2] = pair_tail
        arc_tail[1::2] = pair_head
        self.adj_arc = np.argsort(arc_tail, kind="stable")
        counts = np.bincount(arc_tail, minlength=n_flow_nodes)
        self.adj_start = np.zeros(n_flow_nodes + 1, dtype=np.int64)
        np.cumsum(counts, out=self.adj_start[1:])

        self.n_flow_nodes = n_flow_nodes
        # work buffers reused across targets
        self._res = np.empty(n_arcs, dtype=np.int64)
        self._pot = np.empty(n_flow_nodes, dtype=np.float64)
        self._dist = np.empty(n_flow_nodes, dtype=np.float64)
        self._parent = np.empty(n_flow_nodes, dtype=np.int64)
        self._settled = np.empty(n_flow_nodes, dtype=np.bool_)
        heap_cap = n_arcs + n_flow_nodes + 4
        self._heap_key = np.empty(heap_cap, dtype=np.float64)
        self._heap_node = np.empty(heap_cap, dtype=np.int64)

    def solve(
        self,
        target: int,
        limit: float = math.inf,
        method: str = "dijkstra",
        tie_ok: bool = True,
    ):
        """Ship the full demand to `target`.

        Returns (status, cost, residuals) with status 0 = demand met,
        1 = infeasible, 2 = abandoned because the cost reached `limit`
        (`tie_ok` keeps a solve alive whose cost lands exactly on the limit).
        """
        demand = self.request.n_vms
        if self.total_slots < demand:
            return 1, math.inf, None
        self._res[:] = self.arc_cap
        if method == "dijkstra":
            self._pot[:] = 0.0
            if _HAVE_NUMBA:
                status, cost = _ssp_kernel(
                    self.source,
                    target,
                    demand,
                    self.adj_start,
                    self.adj_arc,
                    self.arc_to,
                    self.arc_cost,
                    self._res,
                    self._pot,
                    self._dist,
                    self._parent,
                    self._settled,
                    self._heap_key,
                    self._heap_node,
                    limit,
                    tie_ok,
                )
            else:
                status, cost = _ssp_dijkstra_py(self, target, demand, limit, tie_ok=tie_ok)
        elif method == "dijkstra_py":
            self._pot[:] = 0.0
            status, cost = _ssp_dijkstra_py(self, target, demand, limit, tie_ok=tie_ok)
        elif method == "dijkstra_py_full":
            self._pot[:] = 0.0
            status, cost = _ssp_dijkstra_py(
                self, target, demand, limit, tie_ok=tie_ok, full_update=True
            )
        elif method == "bellman_ford":
            status, cost = _ssp_bellman(self, target, demand, limit, tie_ok)
        else:
            raise ValueError(f"unknown method {method!r}")
        return status, cost, self._res

    def first_unit_distances(self) -> np.ndarray:
        """Cheapest cost of shipping a single VM to each node on the empty
        flow network: a per-target lower bound of demand * distance."""
        if _HAVE_NUMBA:
            _dijkstra_all_kernel(
                self.source,
                self.adj_start,
                self.adj_arc,
                self.arc_to,
                self.arc_cap,
                self.arc_cost,
                self._dist,
                self._settled,
                self._heap_key,
                self._heap_node,
            )
            return self._dist
        dist = np.full(self.n_flow_nodes, np.inf)
        dist[self.source] = 0.0
        heap = [(0.0, self.source)]
        done = [False] * self.n_flow_nodes
        while heap:
            d, u = heapq.heappop(heap)
            if done[u]:
                continue
            done[u] = True
            for idx in range(self.adj_start[u], self.adj_start[u + 1]):
                a = self.adj_arc[idx]
                if self.arc_cap[a] <= 0:
                    continue
                w = int(self.arc_to[a])
                nd = d + self.arc_cost[a]
                if nd < dist[w]:
                    dist[w] = nd
                    heapq.heappush(heap, (nd, w))
        return dist

    def extract_embedding(self, target: int, res: np.ndarray) -> Embedding:
        """Read vm counts and net edge units off the residuals, strip any
        zero-cost flow cycles and price the result."""
        flows = self.arc_cap[0::2] - res[0::2]
        n_src, n_eds = self.n_src, self.n_active_edges
        vm_count = {
            int(self.src_servers[i]): int(flows[i]) for i in np.nonzero(flows[:n_src])[0]
        }
        net = flows[n_src : n_src + n_eds] - flows[n_src + n_eds :]
        edge_units = {
            int(self.active_edges[i]): int(net[i]) for i in np.nonzero(net)[0]
        }
        edge_units = _strip_cycles(self.graph, vm_count, edge_units, target)
        bandwidth = self.request.bandwidth
        compute = self.request.compute
        edge_load = {e: abs(u) * bandwidth for e, u in edge_units.items()}
        cost = 0.0
        for e in sorted(edge_load):
            cost += edge_load[e] * float(self.costs.edge[e])
        for v in sorted(vm_count):
            cost += vm_count[v] * compute * float(self.costs.node[v])
        return Embedding(target, vm_count, edge_load, cost, edge_units)


# ---------------------------------------------------------------------------
# Dijkstra SSP kernel (numba) and its plain-Python mirror
# ---------------------------------------------------------------------------


@njit(cache=True)
def _dijkstra_all_kernel(
    source, adj_start, adj_arc, arc_to, arc_cap, arc_cost, dist, settled, heap_key, heap_node
):
    n = dist.shape[0]
    for i in range(n):
        dist[i] = np.inf
        settled[i] = False
    dist[source] = 0.0
    heap_key[0] = 0.0
    heap_node[0] = source
    heap_size = 1
    while heap_size > 0:
        d = heap_key[0]
        u = heap_node[0]
        heap_size -= 1
        heap_key[0] = heap_key[heap_size]
        heap_node[0] = heap_node[heap_size]
        i = 0
        while True:
            l = 2 * i + 1
            r = l + 1
            m = i
            if l < heap_size and (
                heap_key[l] < heap_key[m]
                or (heap_key[l] == heap_key[m] and heap_node[l] < heap_node[m])
            ):
                m = l
            if r < heap_size and (
                heap_key[r] < heap_key[m]
                or (heap_key[r] == heap_key[m] and heap_node[r] < heap_node[m])
            ):
                m = r
            if m == i:
                break
            heap_key[i], heap_key[m] = heap_key[m], heap_key[i]
            heap_node[i], heap_node[m] = heap_node[m], heap_node[i]
            i = m
        if settled[u]:
            continue
        settled[u] = True
        for idx in range(adj_start[u], adj_start[u + 1]):
            a = adj_arc[idx]
            if arc_cap[a] <= 0:
                continue
            w = arc_to[a]
            if settled[w]:
                continue
            nd = d + arc_cost[a]
            if nd < dist[w]:
                dist[w] = nd
                i = heap_size
                heap_key[i] = nd
                heap_node[i] = w
                heap_size += 1
                while i > 0:
                    p = (i - 1) // 2
                    if heap_key[i] < heap_key[p] or (
                        heap_key[i] == heap_key[p] and heap_node[i] < heap_node[p]
                    ):
                        heap_key[i], heap_key[p] = heap_key[p], heap_key[i]
                        heap_node[i], heap_node[p] = heap_node[p], heap_node[i]
                        i = p
                    else:
                        break


@njit(cache=True)
def _ssp_kernel(
    source,
    target,
    demand,
    adj_start,
    adj_arc,
    arc_to,
    arc_cost,
    res,
    pot,
    dist,
    parent,
    settled,
    heap_key,
    heap_node,
    limit,
    tie_ok,
):
    n = pot.shape[0]
    shipped = 0
    total = 0.0
    while shipped < demand:
        if total > limit or (not tie_ok and total == limit):
            return 2, total
        # Dijkstra over reduced costs, early-terminated at the target.
        for i in range(n):
            dist[i] = np.inf
            settled[i] = False
            parent[i] = -1
        heap_size = 0
        dist[source] = 0.0
        heap_key[0] = 0.0
        heap_node[0] = source
        heap_size = 1
        reached_target = False
        while heap_size > 0:
            # pop min (key, node)
            d = heap_key[0]
            u = heap_node[0]
            heap_size -= 1
            heap_key[0] = heap_key[heap_size]
            heap_node[0] = heap_node[heap_size]
            i = 0
            while True:
                l = 2 * i + 1
                r = l + 1
                m = i
                if l < heap_size and (
                    heap_key[l] < heap_key[m]
                    or (heap_key[l] == heap_key[m] and heap_node[l] < heap_node[m])
                ):
                    m = l
                if r < heap_size and (
                    heap_key[r] < heap_key[m]
                    or (heap_key[r] == heap_key[m] and heap_node[r] < heap_node[m])
                ):
                    m = r
                if m == i:
                    break
                heap_key[i], heap_key[m] = heap_key[m], heap_key[i]
                heap_node[i], heap_node[m] = heap_node[m], heap_node[i]
                i = m
            if settled[u]:
                continue
            settled[u] = True
            if u == target:
                reached_target = True
                break
            for idx in range(adj_start[u], adj_start[u + 1]):
                a = adj_arc[idx]
                if res[a] <= 0:
                    continue
                w = arc_to[a]
                if settled[w]:
                    continue
                rc = arc_cost[a] + pot[u] - pot[w]
                if rc < 0.0:
                    rc = 0.0
                nd = d + rc
                if nd < dist[w]:
                    dist[w] = nd
                    parent[w] = a
                    # push (nd, w)
                    i = heap_size
                    heap_key[i] = nd
                    heap_node[i] = w
                    heap_size += 1
                    while i > 0:
                        p = (i - 1) // 2
                        if heap_key[i] < heap_key[p] or (
                            heap_key[i] == heap_key[p] and heap_node[i] < heap_node[p]
                        ):
                            heap_key[i], heap_key[p] = heap_key[p], heap_key[i]
                            heap_node[i], heap_node[p] = heap_node[p], heap_node[i]
                            i = p
                        else:
                            break
        if not reached_target:
            return 1, total
        dt = dist[target]
        # settled nodes advance by their distance, the rest by the target's
        for i in range(n):
            if settled[i]:
                pot[i] += dist[i]
            else:
                pot[i] += dt
        # bottleneck along the parent chain, capped by the remaining demand
        amt = demand - shipped
        path_cost = 0.0
        v = target
        while v != source:
            a = parent[v]
            if res[a] < amt:
                amt = res[a]
            path_cost += arc_cost[a]
            v = arc_to[a ^ 1]
        # successive path costs never decrease, so project the cheapest finish
        projected = total + (demand - shipped) * path_cost
        if projected > limit or (not tie_ok and projected == limit):
            return 2, total
        v = target
        while v != source:
            a = parent[v]
            res[a] -= amt
            res[a ^ 1] += amt
            v = arc_to[a ^ 1]
        shipped += amt
        total += amt * path_cost
    return 0, total


def _ssp_dijkstra_py(
    problem: _FlowProblem,
    target: int,
    demand: int,
    limit: float,
    tie_ok: bool = True,
    full_update: bool = False,
) -> tuple[int, float]:
    """Reference Python mirror of the kernel.

    `full_update` disables early termination and applies the classic
    pi(v) += min(dist(v), dist(target)) update, for cross-checking the
    settled-only variant.
    """
    adj_start = problem.adj_start
    adj_arc = problem.adj_arc
    arc_to = problem.arc_to
    arc_cost = problem.arc_cost
    res = problem._res
    pot = problem._pot
    n = problem.n_flow_nodes
    source = problem.source
    shipped = 0
    total = 0.0
    while shipped < demand:
        if total > limit or (not tie_ok and total == limit):
            return 2, total
        dist = [math.inf] * n
        parent = [-1] * n
        settled = [False] * n
        dist[source] = 0.0
        heap: list[tuple[float, int]] = [(0.0, source)]
        reached_target = False
        while heap:
            d, u = heapq.heappop(heap)
            if settled[u]:
                continue
            settled[u] = True
            if u == target and not full_update:
                reached_target = True
                break
            for idx in range(adj_start[u], adj_start[u + 1]):
                a = adj_arc[idx]
                if res[a] <= 0:
                    continue
                w = int(arc_to[a])
                if settled[w]:
                    continue
                rc = arc_cost[a] + pot[u] - pot[w]
                if rc < 0.0:
                    rc = 0.0
                nd = d + rc
                if nd < dist[w]:
                    dist[w] = nd
                    parent[w] = a
                    heapq.heappush(heap, (nd, w))
        if full_update:
            reached_target = dist[target] < math.inf
        if not reached_target:
            return 1, total
        dt = dist[target]
        for i in range(n):
            if full_update:
                pot[i] += min(dist[i], dt)
            elif settled[i]:
                pot[i] += dist[i]
            else:
                pot[i] += dt
        amt = demand - shipped
        v = target
        while v != source:
            a = parent[v]
            amt = min(amt, int(res[a]))
            v = int(arc_to[a ^ 1])
        path_cost = 0.0
        v = target
        while v != source:
            a = parent[v]
            res[a] -= amt
            res[a ^ 1] += amt
            path_cost += arc_cost[a]
            v = int(arc_to[a ^ 1])
        shipped += amt
        total += amt * path_cost
    return 0, total


def _ssp_bellman(
    problem: _FlowProblem, target: int, demand: int, limit: float, tie_ok: bool = True
) -> tuple[int, float]:
    """Bellman-Ford based SSP: no potentials, negative residual costs allowed.

    Distances are exact rationals: with floats, a relaxation around a
    forward/reverse arc pair can "improve" by one rounding ulp and knot the
    parent pointers into a cycle. Exact arithmetic rules that out (a residual
    graph of a min-cost flow has no truly negative cycle).
    """
    arc_to = problem.arc_to
    arc_cost = [Fraction(c) for c in problem.arc_cost]
    res = problem._res
    n = problem.n_flow_nodes
    n_arcs = len(arc_to)
    source = problem.source
    shipped = 0
    total = Fraction(0)
    while shipped < demand:
        if total > limit or (not tie_ok and total == limit):
            return 2, float(total)
        dist: list[Fraction | None] = [None] * n
        parent = [-1] * n
        dist[source] = Fraction(0)
        for _ in range(n - 1):
            changed = False
            for a in range(n_arcs):
                if res[a] <= 0:
                    continue
                tail = int(arc_to[a ^ 1])
                if dist[tail] is None:
                    continue
                nd = dist[tail] + arc_cost[a]
                head = int(arc_to[a])
                if dist[head] is None or nd < dist[head]:
                    dist[head] = nd
                    parent[head] = a
                    changed = True
            if not changed:
                break
        if dist[target] is None:
            return 1, float(total)
        amt = demand - shipped
        v = target
        while v != source:
            a = parent[v]
            amt = min(amt, int(res[a]))
            v = int(arc_to[a ^ 1])
        v = target
        while v != source:
            a = parent[v]
            res[a] -= amt
            res[a ^ 1] += amt
            v = int(arc_to[a ^ 1])
        shipped += amt
        total += amt * dist[target]
    return 0, float(total)


# ---------------------------------------------------------------------------
# Embedding finalization
# ---------------------------------------------------------------------------


def _strip_cycles(
    graph: SubstrateGraph,
    vm_count: dict[int, int],
    edge_units: dict[int, int],
    target: int,
) -> dict[int, int]:
    """Remove directed flow cycles (possible on zero-cost edges only) so the
    remaining units decompose into exactly n_vms host->target paths."""
    units = dict(edge_units)
    while True:
        out: dict[int, list[tuple[int, int]]] = {}
        for e, u in units.items():
            if u == 0:
                continue
            edge = graph.edges[e]
            tail, head = (edge.u, edge.v) if u > 0 else (edge.v, edge.u)
            out.setdefault(tail, []).append((head, e))
        cycle = _find_cycle(out)
        if cycle is None:
            return {e: u for e, u in units.items() if u != 0}
        amount = min(abs(units[e]) for e in cycle)
        for e in cycle:
            units[e] -= amount if units[e] > 0 else -amount


def _find_cycle(out: dict[int, list[tuple[int, int]]]) -> list[int] | None:
    """Edge ids of one directed cycle in the positive-flow digraph, or None."""
    color: dict[int, int] = {}  # 0/absent white, 1 on stack, 2 done
    for start in sorted(out):
        if color.get(start, 0):
            continue
        stack = [(start, iter(sorted(out[start])))]
        color[start] = 1
        path_edges: list[int] = []
        while stack:
            node, it = stack[-1]
            advanced = False
            for head, e in it:
                c = color.get(head, 0)
                if c == 1:
                    idx = next(i for i, s in enumerate(stack) if s[0] == head)
                    return path_edges[idx:] + [e]
                if c == 0 and head in out:
                    color[head] = 1
                    stack.append((head, iter(sorted(out[head]))))
                    path_edges.append(e)
                    advanced = True
                    break
                if c == 0:
                    color[head] = 2
            if not advanced:
                color[node] = 2
                stack.pop()
                if path_edges:
                    path_edges.pop()
    return None


def decompose_paths(
    graph: SubstrateGraph, embedding: Embedding, request: VCRequest
) -> list[tuple[int, list[int]]]:
    """Split an embedding into n_vms (host, edge-path) pairs, each path
    carrying exactly `bandwidth` units; collocated VMs get empty paths."""
    out: dict[int, list[list[int]]] = {}
    for e, u in embedding.edge_units.items():
        if u == 0:
            continue
        edge = graph.edges[e]
        tail, head = (edge.u, edge.v) if u > 0 else (edge.v, edge.u)
        out.setdefault(tail, []).append([head, e, abs(u)])
    paths: list[tuple[int, list[int]]] = []
    for host in sorted(embedding.vm_count):
        for _ in range(embedding.vm_count[host]):
            node = host
            path: list[int] = []
            steps = 0
            while node != embedding.ls_node:
                options = [o for o in out.get(node, []) if o[2] > 0]
                if not options or steps > graph.num_nodes + 1:
                    raise ValueError("embedding flow does not decompose into paths")
                nxt = min(options)
                nxt[2] -= 1
                path.append(nxt[1])
                node = nxt[0]
                steps += 1
            paths.append((host, path))
    leftover = sum(o[2] for opts in out.values() for o in opts)
    if leftover != 0:
        raise ValueError("embedding flow does not decompose into paths")
    return paths


def validate_embedding(
    graph: SubstrateGraph,
    request: VCRequest,
    costs: CostVector,
    view: CapacityView,
    embedding: Embedding,
    rel_tol: float = 1e-9,
) -> None:
    """Raise if the embedding violates any of its type invariants."""
    if sum(embedding.vm_count.values()) != request.n_vms:
        raise ValueError("vm counts do not add up to n_vms")
    eff_node = view.effective_node(graph)
    eff_edge = view.effective_edge(graph)
    for v, cnt in embedding.vm_count.items():
        if not graph.is_server[v]:
            raise ValueError(f"VMs placed on non-server node {v}")
        if cnt < 1 or cnt * request.compute > eff_node[v]:
            raise ValueError(f"node {v} over capacity")
    for e, load in embedding.edge_load.items():
        if load < 1 or load > eff_edge[e]:
            raise ValueError(f"edge {e} over capacity")
        if load % request.bandwidth != 0:
            raise ValueError(f"edge {e} load is not a bandwidth multiple")
    cost = sum(
        embedding.edge_load[e] * float(costs.edge[e]) for e in sorted(embedding.edge_load)
    ) + sum(
        embedding.vm_count[v] * request.compute * float(costs.node[v])
        for v in sorted(embedding.vm_count)
    )
    if not math.isclose(cost, embedding.cost, rel_tol=rel_tol, abs_tol=1e-9):
        raise ValueError(f"stored cost {embedding.cost} != recomputed {cost}")
    decompose_paths(graph, embedding, request)


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def find_min_cost_embedding(
    graph: SubstrateGraph,
    request: VCRequest,
    costs: CostVector,
    view: CapacityView,
    method: str = "dijkstra",
) -> Embedding | None:
    """Globally minimum-cost embedding over all logical-switch placements,
    or None when no valid embedding exists under the capacity view.

    Ties break to the lower cost, then the lower target node id, then the
    canonical flow produced by the successive-shortest-path order.

    Candidates are tried in order of the first-unit shortest-path distance,
    which yields a per-target lower bound (demand * distance) that discards
    most targets without running their flow; a target is only abandoned when
    it provably cannot beat the incumbent, and exact cost ties are resolved
    to the lower node id.
    """
    problem = _FlowProblem(graph, request, costs, view)
    if problem.total_slots < request.n_vms:
        return None
    demand = request.n_vms
    first_unit = problem.first_unit_distances().copy()
    order = np.argsort(first_unit[: graph.num_nodes], kind="stable")
    best_cost = math.inf
    best_target = -1
    best_res: np.ndarray | None = None
    for target in order:
        target = int(target)
        if math.isinf(first_unit[target]):
            break  # unreachable, as is every later target in this order
        bound = demand * first_unit[target]
        if bound > best_cost or (bound == best_cost and best_target >= 0 and target > best_target):
            if bound > best_cost:
                break  # remaining targets have even larger lower bounds
            continue
        tie_ok = target < best_target
        status, cost, res = problem.solve(target, limit=best_cost, method=method, tie_ok=tie_ok)
        if status == 0 and (cost < best_cost or (cost == best_cost and target < best_target)):
            best_cost = cost
            best_target = target
            best_res = res.copy()
    if best_target < 0:
        return None
    return problem.extract_embedding(best_target, best_res)


def solve_flow_for_target(
    graph: SubstrateGraph,
    request: VCRequest,
    costs: CostVector,
    view: CapacityView,
    target: int,
    method: str = "dijkstra",
) -> Embedding | None:
    """Min-cost embedding with the logical switch pinned to `target`."""
    if not (0 <= target < graph.num_nodes):
        raise ValueError(f"target {target} is not a node")
    problem = _FlowProblem(graph, request, costs, view)
    status, _, res = problem.solve(target, method=method)
    if status != 0:
        return None
    return problem.extract_embedding(target, res)

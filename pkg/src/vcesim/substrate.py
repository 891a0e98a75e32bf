"""Capacitated substrate network construction: fat-tree, BCube, MDCube.

All builders are deterministic: identical parameters yield identical node and
edge identities, so seeded experiments replay exactly. Servers carry compute
capacity; switches carry capacity 0 and act only as transit nodes and
logical-switch placements.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "NodeKind",
    "SubstrateNode",
    "SubstrateEdge",
    "SubstrateGraph",
    "build_fat_tree",
    "build_bcube",
    "build_mdcube",
    "build_custom",
    "dump_topology",
    "parse_topology",
]


class NodeKind(Enum):
    SERVER = "server"
    SWITCH = "switch"


@dataclass(frozen=True)
class SubstrateNode:
    id: int
    kind: NodeKind
    cap: int


@dataclass(frozen=True)
class SubstrateEdge:
    id: int
    u: int
    v: int
    cap: int


class SubstrateGraph:
    """Immutable capacitated undirected graph with dense node/edge ids.

    Derived constants follow the usual sizing conventions: ``c_e`` is the
    maximum edge capacity, ``c_v`` the maximum server capacity and ``size_g``
    the node count plus edge count.
    """

    def __init__(self, nodes: list[SubstrateNode], edges: list[SubstrateEdge]):
        _validate(nodes, edges)
        self.nodes = nodes
        self.edges = edges
        self.adjacency: list[list[int]] = [[] for _ in nodes]
        for e in edges:
            self.adjacency[e.u].append(e.id)
            self.adjacency[e.v].append(e.id)
        self.node_caps = np.array([n.cap for n in nodes], dtype=np.int64)
        self.edge_caps = np.array([e.cap for e in edges], dtype=np.int64)
        self.edge_u = np.array([e.u for e in edges], dtype=np.int64)
        self.edge_v = np.array([e.v for e in edges], dtype=np.int64)
        self.server_ids = np.array(
            [n.id for n in nodes if n.kind is NodeKind.SERVER], dtype=np.int64
        )
        self.is_server = np.zeros(len(nodes), dtype=bool)
        self.is_server[self.server_ids] = True
        self.c_e = int(self.edge_caps.max()) if edges else 0
        self.c_v = int(self.node_caps[self.server_ids].max())
        self.size_g = len(nodes) + len(edges)
        if not self.is_connected():
            raise ValueError("substrate graph must be connected")

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def num_servers(self) -> int:
        return len(self.server_ids)

    @property
    def c_max(self) -> int:
        return max(self.c_e, self.c_v)

    def other_end(self, edge_id: int, node: int) -> int:
        e = self.edges[edge_id]
        return e.v if e.u == node else e.u

    def is_connected(self) -> bool:
        if not self.nodes:
            return False
        seen = np.zeros(len(self.nodes), dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            u = stack.pop()
            for eid in self.adjacency[u]:
                w = self.other_end(eid, u)
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        return bool(seen.all())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SubstrateGraph):
            return NotImplemented
        return self.nodes == other.nodes and self.edges == other.edges


def _validate(nodes: list[SubstrateNode], edges: list[SubstrateEdge]) -> None:
    if not nodes:
        raise ValueError("graph needs at least one node")
    for i, n in enumerate(nodes):
        if n.id != i:
            raise ValueError(f"node ids must be dense 0..{len(nodes) - 1}")
        if n.kind is NodeKind.SERVER and n.cap < 1:
            raise ValueError(f"server {n.id} must have cap >= 1")
        if n.kind is NodeKind.SWITCH and n.cap != 0:
            raise ValueError(f"switch {n.id} must have cap == 0")
    if not any(n.kind is NodeKind.SERVER for n in nodes):
        raise ValueError("graph needs at least one server")
    seen_pairs = set()
    for i, e in enumerate(edges):
        if e.id != i:
            raise ValueError("edge ids must be dense 0..|E|-1")
        if e.u == e.v:
            raise ValueError(f"edge {e.id} endpoints must be distinct")
        if not (0 <= e.u < len(nodes) and 0 <= e.v < len(nodes)):
            raise ValueError(f"edge {e.id} references unknown node")
        if e.cap < 1:
            raise ValueError(f"edge {e.id} must have cap >= 1")
        pair = (min(e.u, e.v), max(e.u, e.v))
        if pair in seen_pairs:
            raise ValueError(f"duplicate edge between {pair}")
        seen_pairs.add(pair)


def build_fat_tree(k: int, server_cap: int = 20, edge_cap: int = 20) -> SubstrateGraph:
    """Standard k-ary fat-tree: k pods of k/2 edge and k/2 aggregation
    switches, (k/2)^2 core switches, k^3/4 servers.

    Node order: servers, then edge switches, aggregation switches, core
    switches (pod-major). Aggregation switch j of every pod uplinks to core
    switches j*(k/2) .. (j+1)*(k/2)-1.
    """
    if k < 2 or k % 2 != 0:
        raise ValueError(f"fat-tree arity must be positive and even, got {k}")
    if server_cap < 1 or edge_cap < 1:
        raise ValueError("capacities must be >= 1")
    half = k // 2
    n_servers = k * half * half
    n_edge_sw = k * half
    n_agg_sw = k * half
    nodes: list[SubstrateNode] = []
    for i in range(n_servers):
        nodes.append(SubstrateNode(i, NodeKind.SERVER, server_cap))
    base_edge = n_servers
    base_agg = base_edge + n_edge_sw
    base_core = base_agg + n_agg_sw
    n_core = half * half
    for i in range(n_edge_sw + n_agg_sw + n_core):
        nodes.append(SubstrateNode(base_edge + i, NodeKind.SWITCH, 0))

    edges: list[SubstrateEdge] = []

    def add_edge(u: int, v: int) -> None:
        edges.append(SubstrateEdge(len(edges), u, v, edge_cap))

    # server -> edge switch
    for pod in range(k):
        for esw in range(half):
            sw = base_edge + pod * half + esw
            for s in range(half):
                add_edge((pod * half + esw) * half + s, sw)
    # edge switch -> aggregation switch (full mesh within pod)
    for pod in range(k):
        for esw in range(half):
            for asw in range(half):
                add_edge(base_edge + pod * half + esw, base_agg + pod * half + asw)
    # aggregation switch -> core, striped by aggregation index
    for pod in range(k):
        for asw in range(half):
            for c in range(half):
                add_edge(base_agg + pod * half + asw, base_core + asw * half + c)

    return SubstrateGraph(nodes, edges)


def _bcube_nodes_edges(
    n: int, k: int, server_cap: int, edge_cap: int, node_offset: int, edge_offset: int
) -> tuple[list[SubstrateNode], list[SubstrateEdge]]:
    n_servers = n ** (k + 1)
    switches_per_level = n**k
    nodes = [
        SubstrateNode(node_offset + i, NodeKind.SERVER, server_cap) for i in range(n_servers)
    ]
    base_sw = node_offset + n_servers
    for level in range(k + 1):
        for i in range(switches_per_level):
            nodes.append(SubstrateNode(base_sw + level * switches_per_level + i, NodeKind.SWITCH, 0))
    edges: list[SubstrateEdge] = []
    for level in range(k + 1):
        for s in range(n_servers):
            # switch index = server address with digit `level` removed
            high = s // (n ** (level + 1))
            low = s % (n**level)
            sw_idx = high * (n**level) + low
            sw = base_sw + level * switches_per_level + sw_idx
            edges.append(
                SubstrateEdge(edge_offset + len(edges), node_offset + s, sw, edge_cap)
            )
    return nodes, edges


def build_bcube(n: int, k: int, server_cap: int = 20, edge_cap: int = 20) -> SubstrateGraph:
    """BCube(n, k): n^(k+1) servers, k+1 levels of n^k switches each.

    Server s attaches at level l to the switch addressed by dropping digit l
    of s's base-n address, so every server has degree k+1.
    """
    if n < 2:
        raise ValueError(f"BCube arity must be >= 2, got {n}")
    if k < 0:
        raise ValueError(f"BCube level must be >= 0, got {k}")
    if server_cap < 1 or edge_cap < 1:
        raise ValueError("capacities must be >= 1")
    nodes, edges = _bcube_nodes_edges(n, k, server_cap, edge_cap, 0, 0)
    return SubstrateGraph(nodes, edges)


def build_mdcube(
    containers: int,
    n: int,
    k: int,
    server_cap: int = 20,
    edge_cap: int = 20,
) -> SubstrateGraph:
    """One-dimensional MDCube of `containers` BCube(n, k) containers.

    Every unordered container pair (a, b), a < b, is joined by exactly one
    inter-container edge between switch local-index b-1 of container a and
    switch local-index a of container b (switch lists ordered by level then
    address), so no switch carries more than one inter-container link.
    """
    if containers < 2:
        raise ValueError(f"MDCube needs >= 2 containers, got {containers}")
    if n < 2:
        raise ValueError(f"BCube arity must be >= 2, got {n}")
    if k < 0:
        raise ValueError(f"BCube level must be >= 0, got {k}")
    switches_per_container = (k + 1) * n**k
    if containers - 1 > switches_per_container:
        raise ValueError(
            f"{containers - 1} inter-container links per container exceed "
            f"{switches_per_container} switches"
        )
    nodes: list[SubstrateNode] = []
    edges: list[SubstrateEdge] = []
    nodes_per_container = n ** (k + 1) + switches_per_container
    switch_base: list[int] = []
    for c in range(containers):
        c_nodes, c_edges = _bcube_nodes_edges(
            n, k, server_cap, edge_cap, len(nodes), len(edges)
        )
        switch_base.append(len(nodes) + n ** (k + 1))
        nodes.extend(c_nodes)
        edges.extend(c_edges)
    for a in range(containers):
        for b in range(a + 1, containers):
            u = switch_base[a] + (b - 1)
            v = switch_base[b] + a
            edges.append(SubstrateEdge(len(edges), u, v, edge_cap))
    assert len(nodes) == containers * nodes_per_container
    return SubstrateGraph(nodes, edges)


def build_custom(
    node_specs: list[tuple[str, int]], edge_specs: list[tuple[int, int, int]]
) -> SubstrateGraph:
    """Assemble a graph from ("server"|"switch", cap) and (u, v, cap) specs."""
    nodes = [
        SubstrateNode(i, NodeKind(kind), cap) for i, (kind, cap) in enumerate(node_specs)
    ]
    edges = [SubstrateEdge(i, u, v, cap) for i, (u, v, cap) in enumerate(edge_specs)]
    return SubstrateGraph(nodes, edges)


def dump_topology(graph: SubstrateGraph) -> str:
    """Plain-text dump: `node_id kind cap` lines, then `edge_id u v cap` lines."""
    lines = [f"{n.id} {n.kind.value} {n.cap}" for n in graph.nodes]
    lines += [f"{e.id} {e.u} {e.v} {e.cap}" for e in graph.edges]
    return "\n".join(lines) + "\n"


def parse_topology(text: str) -> SubstrateGraph:
    """Inverse of :func:`dump_topology`."""
    node_specs: list[tuple[str, int]] = []
    edge_specs: list[tuple[int, int, int]] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) == 3:
            _, kind, cap = parts
            node_specs.append((kind, int(cap)))
        elif len(parts) == 4:
            _, u, v, cap = parts
            edge_specs.append((int(u), int(v), int(cap)))
        else:
            raise ValueError(f"unparseable topology line: {line!r}")
    return build_custom(node_specs, edge_specs)

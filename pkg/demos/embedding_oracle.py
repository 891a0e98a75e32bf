#!/usr/bin/env python3
"""Walk through the min-cost embedding oracle on a small substrate."""

import numpy as np

from vcesim import (
    CapacityView,
    CostVector,
    VCRequest,
    build_custom,
    enumerate_min_cost_embedding,
    find_min_cost_embedding,
)
from vcesim.oracle import decompose_paths, solve_flow_for_target

# Two servers bridged by a switch. A request with compute 12 cannot put two
# VMs on one cap-20 server, so the cluster has to split.
graph = build_custom(
    [("server", 20), ("switch", 0), ("server", 20)],
    [(0, 1, 20), (1, 2, 20)],
)
request = VCRequest(index=1, n_vms=2, bandwidth=4, compute=12, benefit=50)
unit = CostVector.unit(graph)

best = find_min_cost_embedding(graph, request, unit, CapacityView.initial())
print("logical switch at node", best.ls_node)
print("VMs per server:", best.vm_count)
print("bandwidth per edge:", best.edge_load)
print("cost:", best.cost)

# Pin the logical switch to the middle switch instead: same VM split, but
# now both virtual links pay one physical hop each.
pinned = solve_flow_for_target(graph, request, unit, CapacityView.initial(), target=1)
print("\npinned to the switch:", pinned.edge_load, "cost", pinned.cost)

# Each accepted cluster decomposes into one host->LS path per VM.
for host, path in decompose_paths(graph, best, request):
    print(f"VM on server {host} reaches LS over edges {path}")

# The flow solver agrees with brute-force enumeration on tiny instances.
exact = enumerate_min_cost_embedding(graph, request, unit, CapacityView.initial())
assert abs(best.cost - exact.cost) < 1e-9
print("\nbrute-force enumeration confirms cost", exact.cost)

# A residual view reflects prior allocations: fill server 0 and the oracle
# must move everything to server 2.
view = CapacityView.residual(np.array([20, 0, 0]), np.zeros(2, dtype=np.int64))
moved = find_min_cost_embedding(graph, VCRequest(2, 1, 4, 12, 10), unit, view)
print("with server 0 full, a new VM lands on:", list(moved.vm_count))

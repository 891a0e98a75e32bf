#!/usr/bin/env python3
"""Build the three datacenter substrates and look at their shapes."""

from vcesim import build_bcube, build_fat_tree, build_mdcube
from vcesim.substrate import dump_topology

# A k-ary fat-tree has k^3/4 servers, 5k^2/4 switches and 3k^3/4 links.
for k in (4, 8, 12):
    g = build_fat_tree(k)
    print(
        f"fat-tree({k:2d}): {g.num_servers:4d} servers, "
        f"{g.num_nodes - g.num_servers:4d} switches, {g.num_edges:5d} edges, "
        f"|G| = {g.size_g}"
    )

# BCube(n, k) gives every server k+1 ports; MDCube chains BCube containers
# with exactly one link per container pair.
b = build_bcube(12, 1)
print(f"\nBCube(12,1): {b.num_servers} servers, {b.num_edges} edges")
m = build_mdcube(4, 12, 1)
print(f"MDCube(4 x BCube(12,1)): {m.num_servers} servers, {m.num_edges} edges")
print("inter-container links:", [(e.u, e.v) for e in m.edges[-6:]])

# All builders are deterministic, so a rebuild is identical
assert build_fat_tree(4) == build_fat_tree(4)

# The plain-text dump format used by the debugging tools
tiny = build_bcube(2, 0)
print("\nBCube(2,0) dump:")
print(dump_topology(tiny))

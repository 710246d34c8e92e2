"""
Conservative versus greedy routing
==================================

The same map planned twice.  With the distance weight at zero the learned
route keeps to uncluttered zones; with the density weight at zero it heads
straight for the goal through the cluttered corridor.
"""
from pathlib import Path as FsPath

import numpy as np

from zonal_rrt.harness import PlannerConfig, corridor_detour_map, emit_svg, run_planner

world = corridor_detour_map()

for name, weights in (("conservative", {"w1": 0.0, "w2": 1.0, "w3": 10.0}),
                      ("greedy", {"w1": 1.0, "w2": 0.0, "w3": 10.0})):
    res = run_planner(world, PlannerConfig("zonal", depth=4, weights=weights), seed=0)
    zones = res.decomposition.zones
    seq = res.path.zone_sequence
    hops = sum(np.linalg.norm(zones[a].center - zones[b].center) for a, b in zip(seq, seq[1:]))
    print(f"{name:12s} route {seq}")
    print(f"{'':12s} densest zone {max(zones[z].density for z in seq):.4f}, "
          f"zone-centre length {hops:.1f}, path length {res.path.length:.1f}")
    out = FsPath(__file__).with_name(f"strategy_{name}.svg")
    out.write_text(emit_svg(world, res.path, res.decomposition, res.graph), encoding="utf-8")

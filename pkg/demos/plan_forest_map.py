"""
One query through the zonal pipeline, stage by stage
=====================================================

Builds a seeded 200x200 forest map, partitions it, links the zones, learns a
zone route and stitches the local legs.  Writes an SVG of the result next to
this script.
"""
from pathlib import Path as FsPath
import sys
import time

from zonal_rrt import (QHyperparams, RewardWeights, RrtParams, SubgoalParams, build_kdtree,
                       build_zone_graph, get_trajectory, path_is_valid, rrt, train)
from zonal_rrt.harness import emit_svg, gen_forest_map

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
world = gen_forest_map(2, 1000, seed=seed)
print(f"map: {len(world.obstacles)} balls, start {world.start}, goal {world.goal}")

# kd-tree with 16 leaf zones, split at obstacle-centroid medians
t0 = time.perf_counter()
dec = build_kdtree(world, 4)
graph = build_zone_graph(dec, world)
print(f"{len(dec)} zones, {len(graph.edges)} accessible zone pairs "
      f"(gap threshold {graph.gamma_c:.2f}, strip half-width {graph.delta:.2f})")

# tabular Q-learning over the zone graph
table = train(graph, world, dec, RewardWeights(), QHyperparams(seed=seed))
print(f"Q-learning settled after {table.episodes_run} episodes")

# local RRT legs between subgoals, RRT* inside the goal zone
rp = RrtParams.for_map(world, seed=seed, first_solution=True)
path = get_trajectory(world, dec, graph, table, rp, SubgoalParams.for_map(world))
zonal_time = time.perf_counter() - t0
print(f"zone route {path.zone_sequence}, {len(path.subgoals)} subgoals")
print(f"zonal: length {path.length:.1f} in {zonal_time:.3f}s, valid {path_is_valid(path, world, rp.goal_tolerance)}")
for stage, secs in path.stats["stage_timings"].items():
    print(f"  {stage:6s} {secs * 1000:7.2f} ms")

# the whole-map baseline for comparison
t0 = time.perf_counter()
base = rrt(world.start, world.goal, world.bounds, world, RrtParams.for_map(world, seed=seed, max_iterations=100_000))
print(f"rrt:   length {base.length:.1f} in {time.perf_counter() - t0:.3f}s")

out = FsPath(__file__).with_name(f"forest_seed{seed}.svg")
out.write_text(emit_svg(world, path, dec, graph), encoding="utf-8")
print(f"wrote {out}")

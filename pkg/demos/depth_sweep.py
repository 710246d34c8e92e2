"""
Running time against kd-tree depth
==================================

A small cold-start benchmark: plain RRT and the zonal planner at depths 2 to
6 on the same seeded forest maps.  Every zonal time includes partitioning,
connectivity and Q-learning.  Pass the number of maps as the first argument.
"""
import sys

from zonal_rrt.harness import PlannerConfig, Scenario, run_scenario, summarize

n_maps = int(sys.argv[1]) if len(sys.argv) > 1 else 10
planners = (PlannerConfig("rrt"),) + tuple(PlannerConfig("zonal", depth=d) for d in range(2, 7))
records = run_scenario(Scenario(n_maps=n_maps, base_seed=11, planners=planners))
summary = summarize(records)

base = summary["rrt"]["avg_time"]
print(f"{'planner':10s} {'success':>8s} {'avg time':>10s} {'vs rrt':>7s}")
for pid, s in summary.items():
    print(f"{pid:10s} {s['success_rate']:7.1f}% {s['avg_time']:9.4f}s {s['avg_time'] / base:7.2f}")

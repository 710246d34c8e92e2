"""Sampling-based path planning guided by a learned route over kd-tree zones.

The map is split into axis-aligned zones, zones that an agent can pass
between are linked, tabular Q-learning picks a zone route from start to goal,
and RRT stitches a collision-free path zone by zone, finishing with RRT* in
the goal zone.
"""
from .connectivity import ZoneGraph, build_zone_graph, is_accessible, shared_facet
from .geometry import (Aabb, Ball, Box, CollisionChecker, WorldMap, clearance, point_collides,
                       segment_collides)
from .local_planner import (NoSafeSubgoal, Path, PlanFailure, RrtParams, SubgoalParams, Timeout,
                            choose_subgoal, get_trajectory, path_is_valid, rrt, rrt_star)
from .partition import Decomposition, Zone, build_kdtree, zone_density, zone_of
from .qlearning import (NoRouteError, QHyperparams, QTable, RewardWeights, extract_sequence,
                        q_update, reward, train)

__version__ = "0.1.0"

__all__ = [
    "Aabb", "Ball", "Box", "CollisionChecker", "WorldMap",
    "point_collides", "segment_collides", "clearance",
    "Zone", "Decomposition", "build_kdtree", "zone_of", "zone_density",
    "ZoneGraph", "shared_facet", "is_accessible", "build_zone_graph",
    "RewardWeights", "QHyperparams", "QTable", "NoRouteError", "reward", "q_update", "train",
    "extract_sequence",
    "RrtParams", "SubgoalParams", "Path", "Timeout", "NoSafeSubgoal", "PlanFailure",
    "rrt", "rrt_star", "choose_subgoal", "get_trajectory", "path_is_valid",
]

"""Seeded random forest maps."""
from __future__ import annotations

import numpy as np

from ..geometry import Aabb, Ball, Box, WorldMap

__all__ = ["MapGenerationError", "gen_forest_map", "corner_query", "corridor_detour_map"]

MAX_RESAMPLES = 1000
# obstacles keep at least this much clearance from the start and goal
QUERY_MARGIN = 1.0


class MapGenerationError(RuntimeError):
    pass


def corner_query(bounds: Aabb, inset: float = 0.05):
    """Start and goal at opposite corners, ``inset`` of the extent inward."""
    off = inset * bounds.extent
    return bounds.min_corner + off, bounds.max_corner - off


def gen_forest_map(dimension: int, n_obstacles: int, bounds_extent: float = 200.0,
                   radius_range=(1.0, 3.0), seed: int = 0, obstacle_kind: str | None = None,
                   agent_radius: float = 0.0) -> WorldMap:
    """Uniformly scattered balls (2D default) or boxes (3D+ default).

    Radii, or per-axis box half-extents, are uniform in ``radius_range``.  Any
    obstacle that would come within ``QUERY_MARGIN + agent_radius`` of the
    start or goal is redrawn.  Deterministic in ``seed``.
    """
    rmin, rmax = radius_range
    if not 0 < rmin <= rmax:
        raise ValueError("radius_range must satisfy 0 < min <= max")
    kind = obstacle_kind or ("ball" if dimension == 2 else "box")
    if kind not in ("ball", "box"):
        raise ValueError(f"unknown obstacle kind {kind!r}")
    bounds = Aabb(np.zeros(dimension), np.full(dimension, float(bounds_extent)))
    start, goal = corner_query(bounds)
    rng = np.random.default_rng(seed)
    keep_out = QUERY_MARGIN + agent_radius

    obstacles = []
    for _ in range(n_obstacles):
        for _attempt in range(MAX_RESAMPLES):
            c = rng.uniform(0.0, bounds_extent, size=dimension)
            if kind == "ball":
                ob = Ball(c, rng.uniform(rmin, rmax))
            else:
                half = rng.uniform(rmin, rmax, size=dimension)
                ob = Box(c - half, c + half)
            if ob.signed_distance(start) > keep_out and ob.signed_distance(goal) > keep_out:
                obstacles.append(ob)
                break
        else:
            raise MapGenerationError("could not place obstacle clear of start/goal; map too dense")
    return WorldMap(bounds, obstacles, start, goal, agent_radius)


def corridor_detour_map(dense_radius: float = 7.0, sparse_radius: float = 0.5) -> WorldMap:
    """200x200 map with a cluttered direct corridor and an almost empty detour.

    A 4x4 lattice of identical four-obstacle clusters, so a depth-4 kd-tree
    puts one cluster in each zone.  Start and goal sit in the bottom corners.
    The two bottom-middle clusters use ``dense_radius`` (still passable), all
    others ``sparse_radius``.  The direct route crosses the dense zones, the
    detour goes around through the upper rows.
    """
    obstacles = []
    for i in range(4):
        for j in range(4):
            r = dense_radius if j == 0 and i in (1, 2) else sparse_radius
            cx, cy = 25.0 + 50.0 * i, 25.0 + 50.0 * j
            obstacles += [Ball([cx + dx, cy + dy], r) for dx in (-10.0, 10.0) for dy in (-10.0, 10.0)]
    return WorldMap(Aabb([0.0, 0.0], [200.0, 200.0]), obstacles, start=[5.0, 5.0], goal=[195.0, 5.0])

"""kd-tree zonal decomposition of a world map.

Cells are split recursively at the lower median of the member obstacles'
centroid coordinates, cycling through the axes with depth.  A depth-``d``
decomposition always has ``2**d`` leaf zones: a cell without obstacles (or
whose median would produce an empty child) is split at its geometric midpoint.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import Aabb, WorldMap, as_point

__all__ = ["Zone", "Decomposition", "build_kdtree", "zone_of", "zone_density"]


@dataclass(frozen=True, eq=False)
class Zone:
    id: int
    cell: Aabb
    depth: int
    obstacle_ids: tuple
    density: float

    @property
    def center(self) -> np.ndarray:
        return self.cell.center


@dataclass(frozen=True)
class _Node:
    axis: int
    coord: float
    lower: object  # _Node or leaf zone id
    upper: object


@dataclass(frozen=True, eq=False)
class Decomposition:
    zones: tuple
    max_depth: int
    split_planes: tuple  # (axis, coordinate) per internal node, preorder
    bounds: Aabb
    root: object = field(repr=False, default=0)

    def __len__(self):
        return len(self.zones)

    def to_dict(self) -> dict:
        return {
            "max_depth": self.max_depth,
            "split_planes": [[a, c] for a, c in self.split_planes],
            "zones": [
                {"id": z.id, "min": z.cell.min_corner.tolist(), "max": z.cell.max_corner.tolist(),
                 "depth": z.depth, "obstacle_ids": list(z.obstacle_ids), "density": z.density}
                for z in self.zones
            ],
        }


def _split_coord(lo: float, hi: float, values: np.ndarray) -> float:
    if values.size:
        c = float(np.sort(values)[(values.size - 1) // 2])
        if lo < c < hi:
            return c
    return float(0.5 * (lo + hi))


def build_kdtree(world: WorldMap, max_depth: int) -> Decomposition:
    """Partition ``world.bounds`` into ``2**max_depth`` zones (one if there are no obstacles)."""
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    if not world.obstacles:
        max_depth = 0
    n = world.n
    centroids = world.centroids
    measures = world.measures
    zones: list[Zone] = []
    planes: list[tuple[int, float]] = []

    def recurse(cell: Aabb, members: np.ndarray, depth: int):
        if depth == max_depth:
            zid = len(zones)
            density = float(measures[members].sum() / cell.measure()) if members.size else 0.0
            zones.append(Zone(zid, cell, depth, tuple(int(i) for i in members), density))
            return zid
        axis = depth % n
        lo, hi = cell.min_corner[axis], cell.max_corner[axis]
        coord = _split_coord(lo, hi, centroids[members, axis])
        planes.append((axis, coord))
        on_lower = centroids[members, axis] <= coord
        lo_max = cell.max_corner.copy()
        lo_max[axis] = coord
        hi_min = cell.min_corner.copy()
        hi_min[axis] = coord
        lower = recurse(Aabb(cell.min_corner, lo_max), members[on_lower], depth + 1)
        upper = recurse(Aabb(hi_min, cell.max_corner), members[~on_lower], depth + 1)
        return _Node(axis, coord, lower, upper)

    root = recurse(world.bounds, np.arange(len(world.obstacles)), 0)
    return Decomposition(tuple(zones), max_depth, tuple(planes), world.bounds, root)


def zone_of(dec: Decomposition, p) -> int:
    """Id of the zone whose half-open cell contains ``p``.

    Points on an internal split plane belong to the upper child; points on the
    outer max face of the map belong to the adjacent boundary zone.
    """
    p = as_point(p, dec.bounds.n)
    if not dec.bounds.contains(p):
        raise ValueError(f"point {p.tolist()} is outside the map bounds")
    node = dec.root
    while isinstance(node, _Node):
        node = node.upper if p[node.axis] >= node.coord else node.lower
    return node


def zone_density(zone: Zone, world: WorldMap) -> float:
    """Total (unclipped) measure of the zone's member obstacles over the cell measure."""
    if not zone.obstacle_ids:
        return 0.0
    total = sum(world.obstacles[i].measure() for i in zone.obstacle_ids)
    return total / zone.cell.measure()

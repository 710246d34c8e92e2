"""Zone accessibility and the zone adjacency graph.

Two zones are connected when their cells share a facet of positive measure
and obstacles near that facet leave a passage.  In 2D the passage test
gathers obstacle centroids inside a strip of half-width ``delta`` around the
shared border, adds the border's two endpoints, sorts along the border and
compares the largest consecutive gap with ``gamma_c``.  In 3D and above the
facet is gridded and each cell centre is probed with a short segment across
the border.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .geometry import Aabb, WorldMap
from .partition import Decomposition, Zone

__all__ = [
    "Facet",
    "ZoneGraph",
    "shared_facet",
    "is_accessible",
    "build_zone_graph",
    "default_delta",
    "default_gamma_c",
]

FACET_TOL = 1e-9
# cap on probe cells per facet in n >= 3; cells grow beyond gamma_c past this
MAX_FACET_CELLS = 4096

_argsort = np.argsort


class Facet(NamedTuple):
    axis: int
    coord: float
    overlap: Aabb  # degenerate along ``axis``


@dataclass(frozen=True, eq=False)
class ZoneGraph:
    zone_count: int
    edges: frozenset  # of (i, j) with i < j
    delta: float
    gamma_c: float
    adjacency: tuple = field(repr=False, default=())

    @classmethod
    def from_edges(cls, zone_count: int, edges, delta: float, gamma_c: float) -> "ZoneGraph":
        edges = frozenset((min(i, j), max(i, j)) for i, j in edges)
        adj = [[] for _ in range(zone_count)]
        for i, j in edges:
            adj[i].append(j)
            adj[j].append(i)
        return cls(zone_count, edges, delta, gamma_c, tuple(tuple(sorted(a)) for a in adj))

    def neighbors(self, z: int) -> tuple:
        return self.adjacency[z]

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def to_dict(self) -> dict:
        return {"zone_count": self.zone_count, "delta": self.delta, "gamma_c": self.gamma_c,
                "edges": sorted([list(e) for e in self.edges])}


def default_delta(world: WorldMap) -> float:
    """Twice the largest obstacle reach (largest half-side for boxes)."""
    ch = world.checker
    reach = np.concatenate([ch.ball_radii, 0.5 * (ch.box_max - ch.box_min).max(axis=1)])
    return 2.0 * float(reach.max()) if reach.size else 1.0


def default_gamma_c(world: WorldMap) -> float:
    """Agent diameter plus twice the mean obstacle radius."""
    ch = world.checker
    # a box blocks at least its smallest side across any axis
    radii = np.concatenate([ch.ball_radii, 0.5 * (ch.box_max - ch.box_min).min(axis=1)])
    mean_r = float(radii.mean()) if radii.size else 0.0
    return max(2.0 * world.agent_radius + 2.0 * mean_r, 1e-6)


def shared_facet(zi: Zone, zj: Zone) -> Facet | None:
    """The common border of two cells, or ``None`` for disjoint/corner-touching cells."""
    a, b = zi.cell, zj.cell
    n = a.n
    lo = np.maximum(a.min_corner, b.min_corner)
    hi = np.minimum(a.max_corner, b.max_corner)
    for axis in range(n):
        if abs(a.max_corner[axis] - b.min_corner[axis]) <= FACET_TOL:
            coord = float(b.min_corner[axis])
        elif abs(b.max_corner[axis] - a.min_corner[axis]) <= FACET_TOL:
            coord = float(a.min_corner[axis])
        else:
            continue
        others = [k for k in range(n) if k != axis]
        if all(hi[k] - lo[k] > FACET_TOL for k in others):
            flo, fhi = lo.copy(), hi.copy()
            flo[axis] = fhi[axis] = coord
            return Facet(axis, coord, Aabb(flo, fhi))
    return None


class _StripIndex:
    """Centroids sorted along each axis, so a delta-strip is one contiguous slice."""

    def __init__(self, centroids: np.ndarray):
        self.centroids = centroids
        self.order = [np.argsort(centroids[:, k], kind="stable") for k in range(centroids.shape[1])]
        self.keys = [centroids[o, k] for k, o in enumerate(self.order)]

    def strip(self, axis: int, coord: float, delta: float) -> np.ndarray:
        keys = self.keys[axis]
        lo = np.searchsorted(keys, coord - delta, side="right")
        hi = np.searchsorted(keys, coord + delta, side="left")
        return self.centroids[self.order[axis][lo:hi]]


def _max_gap_2d(world: WorldMap, facet: Facet, delta: float, index: _StripIndex | None = None) -> float:
    axis = facet.axis
    along = 1 - axis
    lo = facet.overlap.min_corner[along]
    hi = facet.overlap.max_corner[along]
    if index is None:
        c = world.centroids
        c = c[np.abs(c[:, axis] - facet.coord) < delta]
    else:
        c = index.strip(axis, facet.coord, delta)
    c = c[(c[:, along] >= lo) & (c[:, along] <= hi)]
    ends = np.zeros((2, 2))
    ends[:, axis] = facet.coord
    ends[:, along] = (lo, hi)
    pts = np.vstack([c, ends])
    pts = pts[_argsort(pts[:, along], kind="stable")]
    steps = np.diff(pts, axis=0)
    return float(np.sqrt(np.einsum("ij,ij->i", steps, steps)).max())


def _grid_has_passage(world: WorldMap, facet: Facet, delta: float, gamma_c: float) -> bool:
    n = world.n
    others = [k for k in range(n) if k != facet.axis]
    ext = facet.overlap.extent[others]
    counts = np.maximum(1, np.ceil(ext / gamma_c).astype(int))
    while np.prod(counts) > MAX_FACET_CELLS:
        counts = np.maximum(1, counts // 2)
    axes = [facet.overlap.min_corner[k] + (np.arange(m) + 0.5) * (e / m)
            for k, m, e in zip(others, counts, ext)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n - 1)
    region = Aabb(facet.overlap.min_corner - _axis_vec(n, facet.axis, delta),
                  facet.overlap.max_corner + _axis_vec(n, facet.axis, delta))
    checker = world.checker.crop(region)
    if checker.size == 0:
        return True
    a = np.empty(n)
    b = np.empty(n)
    for row in grid:
        a[others] = row
        b[others] = row
        a[facet.axis] = facet.coord - delta
        b[facet.axis] = facet.coord + delta
        # probe ignores the map bounds: the strip may poke past the outer faces
        if not _probe_blocked(checker, a, b):
            return True
    return False


def _probe_blocked(checker, a, b) -> bool:
    d = b - a
    dd = float(d @ d)
    if len(checker.ball_radii):
        ac = checker.ball_centers - a
        t = np.clip(ac @ d / dd, 0.0, 1.0)
        diff = ac - t[:, None] * d
        if np.any(np.einsum("ij,ij->i", diff, diff) <= checker._ball_r2):
            return True
    if len(checker.box_min):
        return bool(np.any(checker._slab(a, d, checker._box_lo, checker._box_hi)))
    return False


def _axis_vec(n: int, axis: int, value: float) -> np.ndarray:
    v = np.zeros(n)
    v[axis] = value
    return v


def is_accessible(zi: Zone, zj: Zone, world: WorldMap, delta: float, gamma_c: float) -> bool:
    """Whether an agent can cross from ``zi`` into ``zj`` through their shared border."""
    if not (delta > 0 and gamma_c > 0):
        raise ValueError("delta and gamma_c must be positive")
    facet = shared_facet(zi, zj)
    if facet is None:
        return False
    if world.n == 2:
        return _max_gap_2d(world, facet, delta) >= gamma_c
    return _grid_has_passage(world, facet, delta, gamma_c)


def build_zone_graph(dec: Decomposition, world: WorldMap, delta: float | None = None,
                     gamma_c: float | None = None) -> ZoneGraph:
    delta = default_delta(world) if delta is None else delta
    gamma_c = default_gamma_c(world) if gamma_c is None else gamma_c
    if not (delta > 0 and gamma_c > 0):
        raise ValueError("delta and gamma_c must be positive")
    zones = dec.zones
    index = _StripIndex(world.centroids) if world.n == 2 and world.obstacles else None
    edges = []
    for i, j in _touching_pairs(zones):
        facet = shared_facet(zones[i], zones[j])
        if world.n == 2:
            ok = _max_gap_2d(world, facet, delta, index) >= gamma_c
        else:
            ok = _grid_has_passage(world, facet, delta, gamma_c)
        if ok:
            edges.append((i, j))
    return ZoneGraph.from_edges(len(zones), edges, delta, gamma_c)


def _touching_pairs(zones) -> list:
    """Pairs ``i < j`` whose cells share a facet, found in one vectorised pass."""
    if len(zones) < 2:
        return []
    lo = np.array([z.cell.min_corner for z in zones])
    hi = np.array([z.cell.max_corner for z in zones])
    touch = ((np.abs(hi[:, None, :] - lo[None, :, :]) <= FACET_TOL)
             | (np.abs(lo[:, None, :] - hi[None, :, :]) <= FACET_TOL))
    overlap = (np.minimum(hi[:, None, :], hi[None, :, :])
               - np.maximum(lo[:, None, :], lo[None, :, :])) > FACET_TOL
    # touching along exactly one axis and overlapping along all the others
    facet = ((touch & ~overlap).sum(axis=2) == 1) & ((touch | overlap).all(axis=2))
    i, j = np.nonzero(np.triu(facet, k=1))
    return list(zip(i.tolist(), j.tolist()))


def facet_pair_count(dec: Decomposition) -> int:
    return len(_touching_pairs(dec.zones))

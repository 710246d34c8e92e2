"""n-dimensional collision geometry for point robots in axis-aligned worlds.

Points are plain ``numpy`` float arrays of length n (2 <= n <= 6).  Obstacles
are either solid balls or axis-aligned boxes.  Every query inflates obstacles
by the map's ``agent_radius``; balls grow their radius, boxes grow per axis
(a conservative superset of the rounded Minkowski sum).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
import math
from typing import Sequence, Union

import numpy as np

MIN_DIM = 2
MAX_DIM = 6

__all__ = [
    "Aabb",
    "Ball",
    "Box",
    "Obstacle",
    "WorldMap",
    "CollisionChecker",
    "as_point",
    "point_collides",
    "segment_collides",
    "clearance",
]


def as_point(p, n: int | None = None) -> np.ndarray:
    """Coerce ``p`` to a finite 1-D float array, optionally checking its length."""
    arr = np.asarray(p, dtype=float).reshape(-1)
    if not MIN_DIM <= arr.size <= MAX_DIM:
        raise ValueError(f"point dimension must be in [{MIN_DIM}, {MAX_DIM}], got {arr.size}")
    if n is not None and arr.size != n:
        raise ValueError(f"dimension mismatch: expected {n}, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class Aabb:
    """Closed axis-aligned box ``[min_corner, max_corner]``."""

    min_corner: np.ndarray
    max_corner: np.ndarray

    def __post_init__(self):
        lo = as_point(self.min_corner)
        hi = as_point(self.max_corner, lo.size)
        if np.any(lo > hi):
            raise ValueError("Aabb requires min_corner <= max_corner on every axis")
        object.__setattr__(self, "min_corner", lo)
        object.__setattr__(self, "max_corner", hi)

    @property
    def n(self) -> int:
        return self.min_corner.size

    @property
    def extent(self) -> np.ndarray:
        return self.max_corner - self.min_corner

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.min_corner + self.max_corner)

    def measure(self) -> float:
        return float(np.prod(self.extent))

    def diagonal(self) -> float:
        return float(np.linalg.norm(self.extent))

    def contains(self, p, tol: float = 0.0) -> bool:
        p = np.asarray(p, dtype=float)
        return bool(np.all(p >= self.min_corner - tol) and np.all(p <= self.max_corner + tol))

    def union(self, other: "Aabb") -> "Aabb":
        return Aabb(np.minimum(self.min_corner, other.min_corner),
                    np.maximum(self.max_corner, other.max_corner))

    def sample(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
        return rng.uniform(self.min_corner, self.max_corner,
                           size=None if size is None else (size, self.n))

    def __eq__(self, other):
        if not isinstance(other, Aabb):
            return NotImplemented
        return (np.array_equal(self.min_corner, other.min_corner)
                and np.array_equal(self.max_corner, other.max_corner))

    def __repr__(self):
        return f"Aabb({self.min_corner.tolist()}, {self.max_corner.tolist()})"


@dataclass(frozen=True, eq=False)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError("Ball radius must be positive")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def n(self) -> int:
        return self.center.size

    def centroid(self) -> np.ndarray:
        return self.center

    def measure(self) -> float:
        n = self.n
        return math.pi ** (n / 2) / math.gamma(n / 2 + 1) * self.radius ** n

    def signed_distance(self, p) -> float:
        return float(np.linalg.norm(np.asarray(p, dtype=float) - self.center) - self.radius)

    def __eq__(self, other):
        if not isinstance(other, Ball):
            return NotImplemented
        return np.array_equal(self.center, other.center) and self.radius == other.radius

    def __repr__(self):
        return f"Ball({self.center.tolist()}, {self.radius})"


@dataclass(frozen=True, eq=False)
class Box:
    min_corner: np.ndarray
    max_corner: np.ndarray

    def __post_init__(self):
        lo = as_point(self.min_corner)
        hi = as_point(self.max_corner, lo.size)
        if not np.all(lo < hi):
            raise ValueError("Box requires min_corner < max_corner on every axis")
        object.__setattr__(self, "min_corner", lo)
        object.__setattr__(self, "max_corner", hi)

    @property
    def n(self) -> int:
        return self.min_corner.size

    def centroid(self) -> np.ndarray:
        return 0.5 * (self.min_corner + self.max_corner)

    def measure(self) -> float:
        return float(np.prod(self.max_corner - self.min_corner))

    def signed_distance(self, p) -> float:
        p = np.asarray(p, dtype=float)
        below = self.min_corner - p
        above = p - self.max_corner
        outside = np.maximum(np.maximum(below, above), 0.0)
        if np.any(outside > 0):
            return float(np.linalg.norm(outside))
        return float(np.max(np.maximum(below, above)))

    def __eq__(self, other):
        if not isinstance(other, Box):
            return NotImplemented
        return (np.array_equal(self.min_corner, other.min_corner)
                and np.array_equal(self.max_corner, other.max_corner))

    def __repr__(self):
        return f"Box({self.min_corner.tolist()}, {self.max_corner.tolist()})"


Obstacle = Union[Ball, Box]


class CollisionChecker:
    """Vectorised collision kernel over a fixed obstacle set.

    Holds the obstacle parameters as stacked arrays.  ``crop`` returns a
    checker restricted to obstacles that can touch a given box, which is
    exact for any query whose segments stay inside that box.
    """

    def __init__(self, ball_centers, ball_radii, box_min, box_max, bounds: Aabb,
                 agent_radius: float = 0.0):
        n = bounds.n
        self.n = n
        self.bounds = bounds
        self.agent_radius = float(agent_radius)
        self.ball_centers = np.asarray(ball_centers, dtype=float).reshape(-1, n)
        self.ball_radii = np.asarray(ball_radii, dtype=float).reshape(-1)
        self.box_min = np.asarray(box_min, dtype=float).reshape(-1, n)
        self.box_max = np.asarray(box_max, dtype=float).reshape(-1, n)
        r = self.agent_radius
        self._ball_r2 = (self.ball_radii + r) ** 2
        self._ball_sq = np.einsum("ij,ij->i", self.ball_centers, self.ball_centers)
        self._box_lo = self.box_min - r
        self._box_hi = self.box_max + r
        self._lo = bounds.min_corner
        self._hi = bounds.max_corner

    @classmethod
    def from_obstacles(cls, obstacles: Sequence[Obstacle], bounds: Aabb,
                       agent_radius: float = 0.0) -> "CollisionChecker":
        n = bounds.n
        balls = [o for o in obstacles if isinstance(o, Ball)]
        boxes = [o for o in obstacles if isinstance(o, Box)]
        return cls(
            np.array([b.center for b in balls]).reshape(-1, n),
            np.array([b.radius for b in balls]),
            np.array([b.min_corner for b in boxes]).reshape(-1, n),
            np.array([b.max_corner for b in boxes]).reshape(-1, n),
            bounds, agent_radius,
        )

    @property
    def size(self) -> int:
        return len(self.ball_radii) + len(self.box_min)

    def crop(self, region: Aabb) -> "CollisionChecker":
        r = self.agent_radius
        lo, hi = region.min_corner, region.max_corner
        gap = np.maximum(np.maximum(lo - self.ball_centers, self.ball_centers - hi), 0.0)
        keep_balls = np.einsum("ij,ij->i", gap, gap) <= (self.ball_radii + r) ** 2
        keep_boxes = np.all((self._box_lo <= hi) & (self._box_hi >= lo), axis=1)
        return CollisionChecker(self.ball_centers[keep_balls], self.ball_radii[keep_balls],
                                self.box_min[keep_boxes], self.box_max[keep_boxes],
                                self.bounds, r)

    def point_hits(self, p: np.ndarray) -> bool:
        if (p < self._lo).any() or (p > self._hi).any():
            return True
        if len(self.ball_radii):
            d = self.ball_centers - p
            if np.any(np.einsum("ij,ij->i", d, d) <= self._ball_r2):
                return True
        if len(self.box_min):
            gap = np.maximum(np.maximum(self.box_min - p, p - self.box_max), 0.0)
            if np.any(np.einsum("ij,ij->i", gap, gap) <= self.agent_radius ** 2):
                return True
        return False

    def points_hit(self, pts: np.ndarray) -> np.ndarray:
        """Boolean mask over an ``(m, n)`` batch of points."""
        pts = np.asarray(pts, dtype=float).reshape(-1, self.n)
        out = np.any((pts < self.bounds.min_corner) | (pts > self.bounds.max_corner), axis=1)
        if len(self.ball_radii):
            d = pts[:, None, :] - self.ball_centers[None, :, :]
            out |= np.any(np.einsum("mkj,mkj->mk", d, d) <= self._ball_r2, axis=1)
        if len(self.box_min):
            gap = np.maximum(np.maximum(self.box_min[None] - pts[:, None], pts[:, None] - self.box_max[None]), 0.0)
            out |= np.any(np.einsum("mkj,mkj->mk", gap, gap) <= self.agent_radius ** 2, axis=1)
        return out

    def segment_hits(self, a: np.ndarray, b: np.ndarray) -> bool:
        lo, hi = self._lo, self._hi
        if (a < lo).any() or (a > hi).any() or (b < lo).any() or (b > hi).any():
            return True
        return self.segment_hits_inside(a, b)

    def segment_hits_inside(self, a: np.ndarray, b: np.ndarray) -> bool:
        """``segment_hits`` for endpoints already known to lie in bounds."""
        d = b - a
        if len(self._ball_sq) and self._balls_hit(a, d):
            return True
        if len(self.box_min):
            return bool(self._slab(a, d, self._box_lo, self._box_hi).any())
        return False

    def _balls_hit(self, a: np.ndarray, d: np.ndarray) -> bool:
        # |c - (a + t d)|^2 expanded around precomputed |c|^2, t clamped to [0, 1]
        centers = self.ball_centers
        dd = float(d @ d)
        dist2 = centers @ a
        dist2 *= -2.0
        dist2 += self._ball_sq
        dist2 += float(a @ a)
        if dd > 0.0:
            proj = centers @ d
            proj -= float(a @ d)
            t = proj * (1.0 / dd)
            t.clip(0.0, 1.0, out=t)
            proj *= 2.0
            proj -= t * dd
            proj *= t
            dist2 -= proj
        return bool((dist2 <= self._ball_r2).any())

    def segments_hit(self, a: np.ndarray, ends: np.ndarray) -> np.ndarray:
        """Mask over segments ``a -> ends[k]``; all endpoints assumed in bounds."""
        ends = np.asarray(ends, dtype=float).reshape(-1, self.n)
        out = np.zeros(len(ends), dtype=bool)
        if len(ends) == 0:
            return out
        d = ends - a
        dd = np.einsum("kj,kj->k", d, d)
        if len(self.ball_radii):
            ac = self.ball_centers - a
            proj = d @ ac.T
            with np.errstate(divide="ignore", invalid="ignore"):
                t = np.where(dd[:, None] > 0, proj / dd[:, None], 0.0)
            t = np.clip(t, 0.0, 1.0)
            diff = ac[None, :, :] - t[:, :, None] * d[:, None, :]
            out |= np.any(np.einsum("kij,kij->ki", diff, diff) <= self._ball_r2[None], axis=1)
        if len(self.box_min):
            for k in np.flatnonzero(~out):
                out[k] = np.any(self._slab(a, d[k], self._box_lo, self._box_hi))
        return out

    @staticmethod
    def _slab(a, d, lo, hi) -> np.ndarray:
        # parametric slab intersection of a + t d, t in [0, 1], against boxes [lo, hi]
        flat = d == 0.0
        if flat.any():
            keep = ((a >= lo) & (a <= hi))[:, flat].all(axis=1)
            moving = ~flat
            if not moving.any():
                return keep
            a, d, lo, hi = a[moving], d[moving], lo[:, moving], hi[:, moving]
        else:
            keep = None
        inv = 1.0 / d
        t1 = (lo - a) * inv
        t2 = (hi - a) * inv
        tmin = np.minimum(t1, t2).max(axis=1)
        tmax = np.maximum(t1, t2).min(axis=1)
        hit = (tmin <= tmax) & (tmax >= 0.0) & (tmin <= 1.0)
        return hit if keep is None else hit & keep

    def signed_distances(self, p: np.ndarray) -> np.ndarray:
        parts = []
        if len(self.ball_radii):
            parts.append(np.linalg.norm(self.ball_centers - p, axis=1) - self.ball_radii)
        if len(self.box_min):
            below = self.box_min - p
            above = p - self.box_max
            worst = np.maximum(below, above)
            outside = np.linalg.norm(np.maximum(worst, 0.0), axis=1)
            parts.append(np.where(np.any(worst > 0, axis=1), outside, worst.max(axis=1)))
        return np.concatenate(parts) if parts else np.empty(0)

    def clearances(self, pts: np.ndarray) -> np.ndarray:
        """Minimum signed distance for each row of ``pts`` (inf with no obstacles)."""
        pts = np.asarray(pts, dtype=float).reshape(-1, self.n)
        best = np.full(len(pts), np.inf)
        if len(self.ball_radii):
            d = np.sqrt(np.einsum("mkj,mkj->mk", pts[:, None] - self.ball_centers[None],
                                  pts[:, None] - self.ball_centers[None]))
            best = np.minimum(best, (d - self.ball_radii[None]).min(axis=1))
        if len(self.box_min):
            worst = np.maximum(self.box_min[None] - pts[:, None], pts[:, None] - self.box_max[None])
            outside = np.sqrt(np.einsum("mkj,mkj->mk", np.maximum(worst, 0.0), np.maximum(worst, 0.0)))
            sd = np.where(np.any(worst > 0, axis=2), outside, worst.max(axis=2))
            best = np.minimum(best, sd.min(axis=1))
        return best


@dataclass(frozen=True, eq=False)
class WorldMap:
    """Bounded obstacle field with a start/goal query and an agent radius."""

    bounds: Aabb
    obstacles: tuple = ()
    start: np.ndarray = None
    goal: np.ndarray = None
    agent_radius: float = 0.0
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        n = self.bounds.n
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        for o in self.obstacles:
            if o.n != n:
                raise ValueError("obstacle dimension does not match bounds")
        start = self.bounds.center if self.start is None else self.start
        goal = self.bounds.center if self.goal is None else self.goal
        object.__setattr__(self, "start", as_point(start, n))
        object.__setattr__(self, "goal", as_point(goal, n))
        if self.agent_radius < 0:
            raise ValueError("agent_radius must be >= 0")
        if self.validate:
            for o in self.obstacles:
                if not self.bounds.contains(o.centroid()):
                    raise ValueError(f"obstacle centroid outside bounds: {o!r}")
            for name, p in (("start", self.start), ("goal", self.goal)):
                if self.checker.point_hits(p):
                    raise ValueError(f"{name} {p.tolist()} is outside bounds or in collision")

    @property
    def n(self) -> int:
        return self.bounds.n

    @cached_property
    def checker(self) -> CollisionChecker:
        return CollisionChecker.from_obstacles(self.obstacles, self.bounds, self.agent_radius)

    @cached_property
    def centroids(self) -> np.ndarray:
        return np.array([o.centroid() for o in self.obstacles], dtype=float).reshape(-1, self.n)

    @cached_property
    def measures(self) -> np.ndarray:
        return np.array([o.measure() for o in self.obstacles], dtype=float)


def point_collides(p, world: WorldMap) -> bool:
    """True if ``p`` is out of bounds or within ``agent_radius`` of an obstacle."""
    return world.checker.point_hits(as_point(p, world.n))


def segment_collides(a, b, world: WorldMap) -> bool:
    """Exact test of the closed segment ``[a, b]`` against the inflated obstacles."""
    return world.checker.segment_hits(as_point(a, world.n), as_point(b, world.n))


def clearance(p, world: WorldMap) -> float:
    """Signed distance from ``p`` to the nearest obstacle surface.

    Negative inside an obstacle; ``inf`` when the map has no obstacles.  The
    agent radius is not subtracted.
    """
    d = world.checker.signed_distances(as_point(p, world.n))
    return float(d.min()) if d.size else math.inf

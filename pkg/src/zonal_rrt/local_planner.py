"""RRT / RRT* samplers and the zone-by-zone trajectory pipeline.

The same samplers serve as whole-map baselines (``region = world.bounds``)
and as local planners between consecutive zones of a high-level route.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
import math
import time

import numpy as np

from .connectivity import ZoneGraph
from .geometry import Aabb, CollisionChecker, WorldMap, as_point
from .partition import Decomposition, Zone, zone_of
from .qlearning import NoRouteError, QTable, extract_sequence

__all__ = [
    "RrtParams",
    "SubgoalParams",
    "Path",
    "Timeout",
    "NoSafeSubgoal",
    "PlanFailure",
    "rrt",
    "rrt_star",
    "choose_subgoal",
    "get_trajectory",
    "path_is_valid",
]

_SAMPLE_BATCH = 256
_CLOCK_EVERY = 32


class Timeout(RuntimeError):
    """The sampler exhausted its iteration budget or deadline."""


class NoSafeSubgoal(RuntimeError):
    """No sampled candidate in the zone met the clearance threshold."""


class PlanFailure(RuntimeError):
    def __init__(self, stage: str, zone_id: int | None, detail: str = ""):
        super().__init__(f"planning failed at stage {stage!r} (zone {zone_id}) {detail}".strip())
        self.stage = stage
        self.zone_id = zone_id


@dataclass(frozen=True)
class RrtParams:
    step_size: float
    goal_bias: float = 0.05
    max_iterations: int = 5000
    goal_tolerance: float | None = None  # defaults to step_size / 2
    rewire_radius: float | None = None   # defaults to 3 * step_size
    seed: int = 0
    first_solution: bool = False  # RRT* only: stop at the first path found

    def __post_init__(self):
        if not self.step_size > 0:
            raise ValueError("step_size must be positive")
        if not 0 <= self.goal_bias < 1:
            raise ValueError("goal_bias must be in [0, 1)")
        if self.max_iterations <= 0:
            raise ValueError("max_iterations must be positive")
        if self.goal_tolerance is None:
            object.__setattr__(self, "goal_tolerance", self.step_size / 2)
        if self.rewire_radius is None:
            object.__setattr__(self, "rewire_radius", 3 * self.step_size)
        if not 0 < self.goal_tolerance <= self.step_size:
            raise ValueError("goal_tolerance must be in (0, step_size]")
        if self.rewire_radius < 0:
            raise ValueError("rewire_radius must be >= 0")

    @classmethod
    def for_map(cls, world: WorldMap, **overrides) -> "RrtParams":
        """Defaults scaled to the map: step is 2% of the bounds diagonal."""
        overrides.setdefault("step_size", 0.02 * world.bounds.diagonal())
        return cls(**overrides)


@dataclass(frozen=True)
class SubgoalParams:
    m: int = 20
    gamma_s: float = 0.5

    def __post_init__(self):
        if self.m <= 0 or not self.gamma_s > 0:
            raise ValueError("m and gamma_s must be positive")

    @classmethod
    def for_map(cls, world: WorldMap, **overrides) -> "SubgoalParams":
        radii = [getattr(o, "radius", None) for o in world.obstacles]
        radii = [r for r in radii if r is not None] or [
            0.5 * float(np.min(o.max_corner - o.min_corner)) for o in world.obstacles]
        mean_r = float(np.mean(radii)) if radii else 0.0
        overrides.setdefault("gamma_s", max(0.5, 2 * world.agent_radius + 0.1 * mean_r))
        return cls(**overrides)


@dataclass
class Path:
    waypoints: np.ndarray
    length: float = None
    zone_sequence: list | None = None
    subgoals: list | None = None
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        self.waypoints = np.asarray(self.waypoints, dtype=float)
        if self.length is None:
            self.length = _polyline_length(self.waypoints)

    def to_dict(self) -> dict:
        return {
            "waypoints": self.waypoints.tolist(),
            "length": self.length,
            "zone_sequence": self.zone_sequence,
            "subgoals": None if self.subgoals is None else [np.asarray(s).tolist() for s in self.subgoals],
            "stage_timings": self.stats.get("stage_timings", {}),
        }


def _polyline_length(pts: np.ndarray) -> float:
    if len(pts) < 2:
        return 0.0
    return float(np.sqrt(((pts[1:] - pts[:-1]) ** 2).sum(axis=1)).sum())


def path_is_valid(path: Path, world: WorldMap, goal_tolerance: float) -> bool:
    """Exact segment checks against the full map plus the endpoint contract."""
    pts = path.waypoints
    if len(pts) == 0 or not np.array_equal(pts[0], world.start):
        return False
    if np.linalg.norm(pts[-1] - world.goal) > goal_tolerance + 1e-12:
        return False
    checker = world.checker
    if len(pts) == 1:
        return not checker.point_hits(pts[0])
    return not any(checker.segment_hits(a, b) for a, b in zip(pts[:-1], pts[1:]))


class _Sampler:
    """Batched uniform sampling in a box with goal biasing."""

    def __init__(self, rng: np.random.Generator, region: Aabb, goal: np.ndarray, bias: float):
        self.rng, self.region, self.goal, self.bias = rng, region, goal, bias
        self._pts = self._u = None
        self._i = _SAMPLE_BATCH

    def __call__(self) -> np.ndarray:
        if self._i == _SAMPLE_BATCH:
            self._u = self.rng.random(_SAMPLE_BATCH)
            self._pts = self.region.sample(self.rng, _SAMPLE_BATCH)
            self._i = 0
        i = self._i
        self._i += 1
        return self.goal if self._u[i] < self.bias else self._pts[i]


def _prepare(start, goal, region: Aabb, world: WorldMap, checker):
    n = world.n
    start = as_point(start, n)
    goal = as_point(goal, n)
    if checker is None:
        checker = world.checker
    # every steered point lies in the convex hull of start and region samples
    inside = (world.bounds.contains(region.min_corner) and world.bounds.contains(region.max_corner)
              and region.contains(start) and region.contains(goal))
    hits = checker.segment_hits_inside if inside else checker.segment_hits
    return start, goal, checker, hits


class _Tree:
    """Growable node store with a squared-norm cache for nearest queries."""

    def __init__(self, root: np.ndarray, capacity: int):
        self.nodes = np.empty((capacity, root.size))
        self.sq = np.empty(capacity)
        self.parent = np.full(capacity, -1, dtype=np.int64)
        self.k = 0
        self.add(root, -1)

    def add(self, p: np.ndarray, parent: int) -> int:
        k = self.k
        self.nodes[k] = p
        self.sq[k] = p @ p
        self.parent[k] = parent
        self.k = k + 1
        return k

    def nearest(self, q: np.ndarray) -> int:
        k = self.k
        score = self.nodes[:k] @ q
        score *= -2.0
        score += self.sq[:k]
        return int(score.argmin())


def _trace(nodes, parent, idx) -> list:
    out = []
    while idx >= 0:
        out.append(nodes[idx])
        idx = parent[idx]
    return out[::-1]


def rrt(start, goal, region: Aabb, world: WorldMap, p: RrtParams, *,
        rng: np.random.Generator | None = None, checker: CollisionChecker | None = None,
        deadline: float | None = None) -> Path:
    """Plain RRT from ``start`` to ``goal`` sampling inside ``region``.

    A branch succeeds when a node lands within ``goal_tolerance`` of the goal
    and connects to it with a collision-free segment, so the returned path
    ends exactly at ``goal``.  ``checker`` may be a cropped kernel, provided it
    covers ``region``.  Raises :class:`Timeout`.
    """
    start, goal, checker, hits = _prepare(start, goal, region, world, checker)
    if np.array_equal(start, goal):
        return Path(np.array([start]), 0.0, stats={"iterations": 0, "nodes": 1})
    rng = np.random.default_rng(p.seed) if rng is None else rng
    sample = _Sampler(rng, region, goal, p.goal_bias)
    step, tol2 = p.step_size, p.goal_tolerance ** 2

    if np.sum((start - goal) ** 2) <= tol2 and not hits(start, goal):
        return Path(np.array([start, goal]), stats={"iterations": 0, "nodes": 1})

    tree = _Tree(start, p.max_iterations + 1)
    nodes = tree.nodes
    for it in range(p.max_iterations):
        if deadline is not None and it % _CLOCK_EVERY == 0 and time.monotonic() > deadline:
            raise Timeout("deadline reached")
        q = sample()
        i = tree.nearest(q)
        near = nodes[i]
        v = q - near
        dist = math.sqrt(v @ v)
        if dist == 0.0:
            continue
        new = q.copy() if dist <= step else near + v * (step / dist)
        if hits(near, new):
            continue
        k = tree.add(new, i)
        g = goal - new
        if g @ g <= tol2 and (not g.any() or not hits(new, goal)):
            pts = _trace(nodes, tree.parent, k)
            if g.any():
                pts.append(goal)
            return Path(np.array(pts), stats={"iterations": it + 1, "nodes": tree.k})
    raise Timeout(f"no path after {p.max_iterations} iterations")


def rrt_star(start, goal, region: Aabb, world: WorldMap, p: RrtParams, *,
             rng: np.random.Generator | None = None, checker: CollisionChecker | None = None,
             deadline: float | None = None) -> Path:
    """RRT* with choose-parent and rewiring inside ``p.rewire_radius``.

    Runs the full iteration budget and returns the cheapest goal connection,
    unless ``p.first_solution`` is set.  ``stats['cost_history']`` holds the
    best cost every 500 iterations (``inf`` before the first solution).
    """
    start, goal, checker, hits = _prepare(start, goal, region, world, checker)
    if np.array_equal(start, goal):
        return Path(np.array([start]), 0.0, stats={"iterations": 0, "nodes": 1, "cost_history": []})
    rng = np.random.default_rng(p.seed) if rng is None else rng
    sample = _Sampler(rng, region, goal, p.goal_bias)
    step, tol2 = p.step_size, p.goal_tolerance ** 2
    r2 = p.rewire_radius ** 2

    size = p.max_iterations + 1
    tree = _Tree(start, size)
    nodes, parent = tree.nodes, tree.parent
    cost = np.zeros(size)
    children: list[list[int]] = [[]]
    reached: list[int] = []  # nodes with a free segment to the goal
    history: list[float] = []

    def best():
        if not reached:
            return None, math.inf
        idx = np.array(reached)
        total = cost[idx] + np.linalg.norm(nodes[idx] - goal, axis=1)
        j = int(np.argmin(total))
        return int(idx[j]), float(total[j])

    if np.sum((start - goal) ** 2) <= tol2 and not hits(start, goal):
        reached.append(0)

    it = 0
    for it in range(p.max_iterations):
        if it % 500 == 0:
            history.append(best()[1])
        if reached and p.first_solution:
            break
        if deadline is not None and it % _CLOCK_EVERY == 0 and time.monotonic() > deadline:
            raise Timeout("deadline reached")
        q = sample()
        i = tree.nearest(q)
        near = nodes[i]
        v = q - near
        dist = math.sqrt(v @ v)
        if dist == 0.0:
            continue
        new = q.copy() if dist <= step else near + v * (step / dist)
        if hits(near, new):
            continue

        k = tree.k
        dn = nodes[:k] - new
        dn2 = np.einsum("ij,ij->i", dn, dn)
        nbr = np.flatnonzero(dn2 <= r2)
        dnb = np.sqrt(dn2[nbr])
        best_parent = i
        best_cost = cost[i] + math.sqrt(dn2[i])
        if nbr.size:
            via = cost[nbr] + dnb
            cheaper = np.flatnonzero(via < best_cost)
            if cheaper.size:
                order = cheaper[np.argsort(via[cheaper], kind="stable")]
                blocked = checker.segments_hit(new, nodes[nbr[order]])
                free = np.flatnonzero(~blocked)
                if free.size:
                    j = order[free[0]]
                    best_parent = int(nbr[j])
                    best_cost = float(via[j])

        me = tree.add(new, best_parent)
        cost[me] = best_cost
        children.append([])
        children[best_parent].append(me)

        if nbr.size:
            improve = np.flatnonzero(best_cost + dnb < cost[nbr])
            improve = improve[nbr[improve] != best_parent]
            if improve.size:
                blocked = checker.segments_hit(new, nodes[nbr[improve]])
                for j in improve[~blocked]:
                    v = int(nbr[j])
                    delta = best_cost + dnb[j] - cost[v]
                    children[parent[v]].remove(v)
                    parent[v] = me
                    children[me].append(v)
                    stack = [v]
                    while stack:
                        u = stack.pop()
                        cost[u] += delta
                        stack.extend(children[u])

        g = goal - new
        if g @ g <= tol2 and (not g.any() or not hits(new, goal)):
            reached.append(me)
    else:
        it = p.max_iterations

    idx, total = best()
    history.append(total)
    if idx is None:
        raise Timeout(f"no path after {p.max_iterations} iterations")
    pts = _trace(nodes, parent, idx)
    if not np.array_equal(pts[-1], goal):
        pts.append(goal)
    return Path(np.array(pts), stats={"iterations": it, "nodes": tree.k, "cost_history": history})


def choose_subgoal(next_zone: Zone, goal, world: WorldMap, sp: SubgoalParams,
                   rng: np.random.Generator) -> np.ndarray:
    """Pick a safe point inside ``next_zone``.

    Draws ``sp.m`` uniform candidates in the zone cell, keeps those whose
    obstacle clearance is at least ``sp.gamma_s`` and returns the one nearest
    the goal.  Raises :class:`NoSafeSubgoal`.
    """
    goal = as_point(goal, world.n)
    cell = next_zone.cell
    cand = cell.sample(rng, sp.m)
    margin = np.full(world.n, sp.gamma_s + world.agent_radius)
    local = world.checker.crop(Aabb(cell.min_corner - margin, cell.max_corner + margin))
    ok = local.clearances(cand) >= sp.gamma_s
    if world.agent_radius > 0 and ok.any():
        ok &= ~local.points_hit(cand)
    if not ok.any():
        raise NoSafeSubgoal(f"no safe subgoal among {sp.m} candidates in zone {next_zone.id}")
    safe = cand[ok]
    return safe[int(np.argmin(np.linalg.norm(safe - goal, axis=1)))]


def get_trajectory(world: WorldMap, dec: Decomposition, graph: ZoneGraph, qtable: QTable,
                   rp: RrtParams, sp: SubgoalParams, *, deadline: float | None = None) -> Path:
    """Stitch a collision-free path along the learned zone route.

    For each move to the next zone a subgoal is drawn there and plain RRT
    connects to it, sampling in the bounding box of the two zones.  Once in
    the goal zone RRT* finishes inside that zone.  A failed local leg is
    retried once with a fresh subgoal; a subgoal draw is retried once with
    twice the candidates.  Raises :class:`PlanFailure`.
    """
    stage_t: dict[str, float] = {}
    t0 = time.perf_counter()
    start_zone = zone_of(dec, world.start)
    goal_zone = zone_of(dec, world.goal)
    try:
        seq = extract_sequence(qtable, graph, start_zone, goal_zone)
    except NoRouteError as exc:
        raise PlanFailure("route", start_zone, str(exc)) from exc
    stage_t["route"] = time.perf_counter() - t0

    rng = np.random.default_rng(rp.seed)
    zones = dec.zones
    pts = [world.start]
    subgoals = []
    current = world.start
    t0 = time.perf_counter()
    for prev, nxt in zip(seq, seq[1:]):
        region = zones[prev].cell.union(zones[nxt].cell)
        checker = world.checker.crop(region)
        leg = None
        for _attempt in range(2):
            try:
                sub = choose_subgoal(zones[nxt], world.goal, world, sp, rng)
            except NoSafeSubgoal:
                try:
                    sub = choose_subgoal(zones[nxt], world.goal, world, replace(sp, m=2 * sp.m), rng)
                except NoSafeSubgoal as exc:
                    raise PlanFailure("subgoal", nxt, str(exc)) from exc
            try:
                leg = rrt(current, sub, region, world, rp, rng=rng, checker=checker, deadline=deadline)
                break
            except Timeout:
                if deadline is not None and time.monotonic() > deadline:
                    raise PlanFailure("local", nxt, "deadline reached") from None
        if leg is None:
            raise PlanFailure("local", nxt, "local RRT timed out twice")
        subgoals.append(sub)
        pts.extend(leg.waypoints[1:])
        current = sub
    stage_t["local"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    cell = zones[goal_zone].cell
    try:
        leg = rrt_star(current, world.goal, cell, world, rp, rng=rng,
                       checker=world.checker.crop(cell), deadline=deadline)
    except Timeout as exc:
        raise PlanFailure("goal", goal_zone, str(exc)) from exc
    pts.extend(leg.waypoints[1:])
    stage_t["goal"] = time.perf_counter() - t0
    return Path(np.array(pts), zone_sequence=list(seq), subgoals=subgoals,
                stats={"stage_timings": stage_t})

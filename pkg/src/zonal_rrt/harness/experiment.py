"""Benchmark scenarios: seeded maps, planner configurations, timed trials.

Every trial regenerates its map inside the worker, so each planner gets its
own copy and pays for every lazily built structure (collision arrays,
partition, graph, Q-table) inside the timed region.  Maps and planner seeds
derive from ``(base_seed, map_id)`` only, which makes a scenario reproducible
independent of the worker count.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
import logging
import time

import numpy as np

from ..connectivity import ZoneGraph, build_zone_graph
from ..geometry import WorldMap
from ..local_planner import (Path, PlanFailure, RrtParams, SubgoalParams, Timeout, get_trajectory,
                             path_is_valid, rrt, rrt_star)
from ..partition import Decomposition, build_kdtree
from ..qlearning import QHyperparams, QTable, RewardWeights, train
from .io import map_hash
from .mapgen import gen_forest_map

__all__ = [
    "ALGORITHMS",
    "PlannerConfig",
    "Scenario",
    "TrialRecord",
    "PlanResult",
    "derive_seed",
    "scenario_map",
    "run_planner",
    "run_trial",
    "run_scenario",
]

log = logging.getLogger(__name__)

ALGORITHMS = ("rrt", "rrt-star", "zonal")
BASELINE_MAX_ITERATIONS = 100_000


@dataclass(frozen=True)
class PlannerConfig:
    """One planner under test.  ``rrt``, ``subgoal`` and ``q`` hold parameter overrides."""

    algorithm: str
    name: str | None = None
    depth: int = 4
    weights: dict = field(default_factory=dict)
    rrt: dict = field(default_factory=dict)
    subgoal: dict = field(default_factory=dict)
    q: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")

    @property
    def planner_id(self) -> str:
        if self.name:
            return self.name
        return f"zonal-d{self.depth}" if self.algorithm == "zonal" else self.algorithm

    def rrt_params(self, world: WorldMap, seed: int) -> RrtParams:
        opts = dict(self.rrt)
        opts.setdefault("seed", seed)
        if self.algorithm == "zonal":
            # the goal-zone RRT* leg returns its first connection
            opts.setdefault("first_solution", True)
        elif self.algorithm == "rrt":
            # the whole-map baseline is bounded by the trial time limit instead
            opts.setdefault("max_iterations", BASELINE_MAX_ITERATIONS)
        return RrtParams.for_map(world, **opts)

    def subgoal_params(self, world: WorldMap) -> SubgoalParams:
        return SubgoalParams.for_map(world, **self.subgoal)

    def q_params(self, seed: int) -> QHyperparams:
        opts = dict(self.q)
        opts.setdefault("seed", seed)
        return QHyperparams(**opts)

    def reward_weights(self) -> RewardWeights:
        return RewardWeights(**self.weights)

    @classmethod
    def from_dict(cls, data: dict) -> "PlannerConfig":
        return cls(**data)


@dataclass(frozen=True)
class Scenario:
    dimension: int = 2
    n_obstacles: int = 1000
    n_maps: int = 30
    planners: tuple = ()
    bounds_extent: float = 200.0
    obstacle_kind: str | None = None
    radius_range: tuple = (1.0, 3.0)
    agent_radius: float = 0.0
    time_limit: float = 30.0
    base_seed: int = 0
    warm_timings: bool = False

    def __post_init__(self):
        if not 2 <= self.dimension <= 6:
            raise ValueError("dimension must be in 2..6")
        if self.n_maps < 1:
            raise ValueError("n_maps must be >= 1")
        if not self.time_limit > 0:
            raise ValueError("time_limit must be positive")
        planners = tuple(p if isinstance(p, PlannerConfig) else PlannerConfig.from_dict(p)
                         for p in self.planners)
        ids = [p.planner_id for p in planners]
        if len(set(ids)) != len(ids):
            raise ValueError(f"planner ids must be unique, got {ids}")
        object.__setattr__(self, "planners", planners)
        object.__setattr__(self, "radius_range", tuple(self.radius_range))

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TrialRecord:
    map_id: int
    planner_id: str
    success: bool
    wall_time_s: float
    path_length: float | None = None
    failure_stage: str | None = None
    stage_timings: dict = field(default_factory=dict)
    path_valid: bool | None = None
    map_hash: str = ""
    seed: int = 0
    warm_time_s: float | None = None
    error: str | None = None
    path: dict | None = None


@dataclass
class PlanResult:
    path: Path
    decomposition: Decomposition | None = None
    graph: ZoneGraph | None = None
    qtable: QTable | None = None

    def to_dict(self) -> dict:
        out = {"path": self.path.to_dict()}
        if self.decomposition is not None:
            out["decomposition"] = self.decomposition.to_dict()
            out["graph"] = self.graph.to_dict()
            out["qtable"] = self.qtable.to_dict()
        return out


def derive_seed(base_seed: int, map_id: int) -> int:
    """A 63-bit seed shared by the map generator and every planner on that map."""
    state = np.random.SeedSequence([base_seed, map_id]).generate_state(2, dtype=np.uint32)
    return int((int(state[0]) << 31) ^ int(state[1]))


def scenario_map(s: Scenario, map_id: int) -> WorldMap:
    return gen_forest_map(s.dimension, s.n_obstacles, bounds_extent=s.bounds_extent,
                          radius_range=s.radius_range, seed=derive_seed(s.base_seed, map_id),
                          obstacle_kind=s.obstacle_kind, agent_radius=s.agent_radius)


def run_planner(world: WorldMap, cfg: PlannerConfig, seed: int,
                deadline: float | None = None) -> PlanResult:
    """Plan one query with ``cfg``; raises ``Timeout`` or ``PlanFailure`` on failure."""
    rp = cfg.rrt_params(world, seed)
    if cfg.algorithm == "rrt":
        return PlanResult(rrt(world.start, world.goal, world.bounds, world, rp, deadline=deadline))
    if cfg.algorithm == "rrt-star":
        return PlanResult(rrt_star(world.start, world.goal, world.bounds, world, rp, deadline=deadline))
    timings = {}
    t0 = time.perf_counter()
    dec = build_kdtree(world, cfg.depth)
    timings["partition"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    graph = build_zone_graph(dec, world)
    timings["connectivity"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    qtable = train(graph, world, dec, cfg.reward_weights(), cfg.q_params(seed))
    timings["qlearning"] = time.perf_counter() - t0
    path = get_trajectory(world, dec, graph, qtable, rp, cfg.subgoal_params(world), deadline=deadline)
    path.stats["stage_timings"] = {**timings, **path.stats.get("stage_timings", {})}
    return PlanResult(path, dec, graph, qtable)


def _warm_time(world: WorldMap, cfg: PlannerConfig, seed: int, first: PlanResult) -> float:
    # same query again, reusing the pipeline and the built collision arrays
    rp = cfg.rrt_params(world, seed)
    t0 = time.perf_counter()
    if cfg.algorithm == "zonal":
        get_trajectory(world, first.decomposition, first.graph, first.qtable, rp,
                       cfg.subgoal_params(world))
    else:
        run_planner(world, cfg, seed)
    return time.perf_counter() - t0


def run_trial(s: Scenario, map_id: int, planner_index: int, keep_path: bool = False) -> TrialRecord:
    """One timed, cold-start query.  Never raises: failures land in the record."""
    cfg = s.planners[planner_index]
    seed = derive_seed(s.base_seed, map_id)
    world = scenario_map(s, map_id)
    rec = TrialRecord(map_id, cfg.planner_id, False, 0.0, map_hash=map_hash(world), seed=seed)
    t0 = time.monotonic()
    try:
        result = run_planner(world, cfg, seed, deadline=t0 + s.time_limit)
    except PlanFailure as exc:
        rec.wall_time_s = time.monotonic() - t0
        rec.failure_stage = exc.stage
        rec.error = str(exc)
        return rec
    except Timeout as exc:
        rec.wall_time_s = time.monotonic() - t0
        rec.failure_stage = "timeout"
        rec.error = str(exc)
        return rec
    except Exception as exc:  # recorded, never propagated to the pool
        rec.wall_time_s = time.monotonic() - t0
        rec.failure_stage = "error"
        rec.error = f"{type(exc).__name__}: {exc}"
        log.error("map %d planner %s raised %s", map_id, cfg.planner_id, rec.error)
        return rec
    rec.wall_time_s = time.monotonic() - t0

    path = result.path
    rec.stage_timings = dict(path.stats.get("stage_timings", {}))
    rp = cfg.rrt_params(world, seed)
    rec.path_valid = path_is_valid(path, world, rp.goal_tolerance)
    if not rec.path_valid:
        rec.failure_stage = "invalid"
        log.error("map %d planner %s returned an invalid path", map_id, cfg.planner_id)
    elif rec.wall_time_s > s.time_limit:
        rec.failure_stage = "timeout"
    else:
        rec.success = True
        rec.path_length = path.length
    if s.warm_timings and rec.success:
        rec.warm_time_s = _warm_time(world, cfg, seed, result)
    if keep_path:
        rec.path = result.to_dict()
    log.info("map %d %-10s success=%s t=%.4fs", map_id, cfg.planner_id, rec.success, rec.wall_time_s)
    return rec


def _run_task(args) -> TrialRecord:
    return run_trial(*args)


def run_scenario(s: Scenario, jobs: int = 1, keep_paths: bool = False) -> list:
    """All ``n_maps x planners`` trials, ordered by (map_id, planner order).

    ``jobs > 1`` fans trials out to a process pool; results are identical
    apart from wall times.  Raises ``RuntimeError`` if two planners saw
    structurally different maps for the same ``map_id``.
    """
    tasks = [(s, m, k, keep_paths) for m in range(s.n_maps) for k in range(len(s.planners))]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_task, tasks))
    else:
        records = [_run_task(t) for t in tasks]
    by_map: dict = {}
    for r in records:
        by_map.setdefault(r.map_id, set()).add(r.map_hash)
    unfair = [m for m, hashes in by_map.items() if len(hashes) != 1]
    if unfair:
        raise RuntimeError(f"planners saw different maps for map ids {unfair}")
    return records

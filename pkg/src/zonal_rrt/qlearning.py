"""Tabular Q-learning over the zone graph.

States are zones, actions are moves to an accessible neighbouring zone, and
transitions are deterministic.  The reward for a move depends on the
destination zone: a distance term (zone centre to goal), a density term, and
a bonus on entering the goal zone.  The goal zone is terminal.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
import random

import numpy as np

from .connectivity import ZoneGraph
from .geometry import WorldMap
from .partition import Decomposition, Zone, zone_of

__all__ = [
    "RewardWeights",
    "QHyperparams",
    "QTable",
    "NoRouteError",
    "resolve_weights",
    "reward",
    "reward_matrix",
    "q_update",
    "train",
    "extract_sequence",
]


class NoRouteError(RuntimeError):
    """The greedy policy does not lead from the start zone to the goal zone."""


@dataclass(frozen=True)
class RewardWeights:
    w1: float = 1.0   # distance
    w2: float = 1.0   # density
    w3: float = 10.0  # goal bonus
    c_d: float | None = None    # defaults to the bounds diagonal
    c_rho: float | None = None  # defaults to the mean nonzero zone density

    def __post_init__(self):
        if min(self.w1, self.w2, self.w3) < 0:
            raise ValueError("reward weights must be non-negative")
        if max(self.w1, self.w2, self.w3) <= 0:
            raise ValueError("at least one reward weight must be positive")
        for c in (self.c_d, self.c_rho):
            if c is not None and not c > 0:
                raise ValueError("normalisers must be positive")


@dataclass(frozen=True)
class QHyperparams:
    alpha: float = 0.1
    gamma: float = 0.9
    epsilon: float = 0.9  # probability of a uniformly random move
    episodes: int = 5000
    max_steps_per_episode: int | None = None  # defaults to 4 * zone_count
    stability_window: int | None = 200  # None disables early stopping
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must be in (0, 1]")
        if not 0 <= self.gamma < 1:
            raise ValueError("gamma must be in [0, 1)")
        if not 0 <= self.epsilon <= 1:
            raise ValueError("epsilon must be in [0, 1]")
        if self.episodes <= 0:
            raise ValueError("episodes must be positive")


class QTable:
    """Action values keyed by directed zone-graph edges."""

    def __init__(self, graph: ZoneGraph, start: int, goal: int):
        self.neighbors = graph.adjacency
        self.q = [[0.0] * len(nb) for nb in self.neighbors]
        self.start = start
        self.goal = goal
        self.degenerate = False
        self.episodes_run = 0

    @property
    def values(self) -> dict:
        return {(z, a): self.q[z][k]
                for z, nb in enumerate(self.neighbors) for k, a in enumerate(nb)}

    def get(self, z: int, a: int) -> float:
        return self.q[z][self.neighbors[z].index(a)]

    def set(self, z: int, a: int, value: float) -> None:
        self.q[z][self.neighbors[z].index(a)] = value

    def max_value(self, z: int) -> float:
        row = self.q[z]
        return max(row) if row else 0.0

    def best_action(self, z: int) -> int | None:
        """Greedy action; ties go to the lowest zone id."""
        row = self.q[z]
        if not row:
            return None
        m = max(row)
        return min(a for a, v in zip(self.neighbors[z], row) if v == m)

    def greedy_policy(self) -> tuple:
        return tuple(self.best_action(z) for z in range(len(self.q)))

    def to_dict(self) -> dict:
        return {"start": self.start, "goal": self.goal, "degenerate": self.degenerate,
                "episodes_run": self.episodes_run,
                "values": [[z, a, v] for (z, a), v in sorted(self.values.items())]}


def resolve_weights(w: RewardWeights, world: WorldMap, dec: Decomposition) -> RewardWeights:
    """Fill in the default normalisers so both reward terms are O(1)."""
    c_d = w.c_d if w.c_d is not None else world.bounds.diagonal()
    if w.c_rho is not None:
        c_rho = w.c_rho
    else:
        dens = [z.density for z in dec.zones if z.density > 0]
        c_rho = float(np.mean(dens)) if dens else 1.0
    return replace(w, c_d=c_d, c_rho=c_rho)


def reward(from_zone: Zone, to_zone: Zone, goal_zone_id: int, world: WorldMap,
           w: RewardWeights) -> float:
    """Reward for moving ``from_zone -> to_zone``; ``w`` must carry resolved normalisers."""
    if w.c_d is None or w.c_rho is None:
        raise ValueError("unresolved reward normalisers; call resolve_weights first")
    r_d = -float(np.linalg.norm(to_zone.center - world.goal)) / w.c_d
    r_rho = -to_zone.density / w.c_rho
    bonus = 1.0 if to_zone.id == goal_zone_id else 0.0
    return w.w1 * r_d + w.w2 * r_rho + w.w3 * bonus


def reward_matrix(graph: ZoneGraph, dec: Decomposition, world: WorldMap, goal: int,
                  w: RewardWeights) -> list:
    """Per-state lists of rewards aligned with ``graph.adjacency``."""
    zones = dec.zones
    return [[reward(zones[z], zones[a], goal, world, w) for a in graph.adjacency[z]]
            for z in range(graph.zone_count)]


def q_update(q: QTable, z: int, a: int, r: float, z_next: int, h: QHyperparams) -> float:
    """One temporal-difference step on ``Q(z, a)``; returns the new value."""
    future = 0.0 if z_next == q.goal else q.max_value(z_next)
    k = q.neighbors[z].index(a)
    old = q.q[z][k]
    new = old + h.alpha * (r + h.gamma * future - old)
    q.q[z][k] = new
    return new


def train(graph: ZoneGraph, world: WorldMap, dec: Decomposition, w: RewardWeights,
          h: QHyperparams) -> QTable:
    """Episodic epsilon-greedy Q-learning from the start zone.

    Stops after ``h.episodes`` episodes, or earlier once the greedy policy has
    been unchanged for ``h.stability_window`` consecutive episodes.  Fully
    determined by ``h.seed``.
    """
    start = zone_of(dec, world.start)
    goal = zone_of(dec, world.goal)
    table = QTable(graph, start, goal)
    if start == goal:
        return table
    if not graph.adjacency[start]:
        table.degenerate = True
        return table

    w = resolve_weights(w, world, dec)
    rewards = reward_matrix(graph, dec, world, goal, w)
    _run_episodes(table, rewards, goal, h, h.max_steps_per_episode or 4 * graph.zone_count)
    return table


def _run_episodes(table: QTable, rewards: list, goal: int, h: QHyperparams, max_steps: int) -> None:
    nbrs = table.neighbors
    q = table.q
    start = table.start
    alpha, gamma, explore = h.alpha, h.gamma, h.epsilon
    window = h.stability_window
    rnd = random.Random(h.seed)
    uniform = rnd.random
    # greedy column per state, lowest zone id on ties (adjacency is sorted)
    best = [0] * len(q)
    stable = 0
    episode = 0
    for episode in range(1, h.episodes + 1):
        changed = False
        z = start
        for _ in range(max_steps):
            row = q[z]
            b = best[z]
            if uniform() < explore:
                k = int(uniform() * len(row))
            else:
                m = row[b]
                if row.count(m) > 1:
                    ties = [i for i, v in enumerate(row) if v == m]
                    k = ties[int(uniform() * len(ties))]
                else:
                    k = b
            z_next = nbrs[z][k]
            if z_next == goal:
                target = rewards[z][k]
            else:
                nxt = q[z_next]
                target = rewards[z][k] + gamma * (nxt[best[z_next]] if nxt else 0.0)
            old = row[k]
            row[k] = new = old + alpha * (target - old)
            if k == b:
                if new < old:
                    m = max(row)
                    nb = row.index(m)
                    if nb != b:
                        best[z] = nb
                        changed = True
            elif new > row[b] or (new == row[b] and k < b):
                best[z] = k
                changed = True
            z = z_next
            if z == goal:
                break
        if window is not None:
            stable = 0 if changed else stable + 1
            if stable >= window:
                break
    table.episodes_run = episode


def extract_sequence(q: QTable, graph: ZoneGraph, start_zone: int, goal_zone: int) -> list:
    """Follow greedy actions from ``start_zone`` until ``goal_zone``.

    Raises :class:`NoRouteError` on a dead end, a repeated zone, or more than
    ``zone_count`` steps.
    """
    seq = [start_zone]
    seen = {start_zone}
    z = start_zone
    while z != goal_zone:
        if not graph.adjacency[z]:
            raise NoRouteError(f"zone {z} has no accessible neighbours")
        z = q.best_action(z)
        if z in seen or len(seq) > graph.zone_count:
            raise NoRouteError(f"greedy policy cycles at zone {z}")
        seq.append(z)
        seen.add(z)
    return seq


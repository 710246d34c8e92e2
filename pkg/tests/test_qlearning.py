import math

import numpy as np
import pytest

from zonal_rrt.connectivity import ZoneGraph, build_zone_graph
from zonal_rrt.geometry import Aabb, Ball, WorldMap
from zonal_rrt.harness.experiment import PlannerConfig, run_planner
from zonal_rrt.harness.mapgen import corridor_detour_map, gen_forest_map
from zonal_rrt.local_planner import path_is_valid
from zonal_rrt.partition import Zone, build_kdtree, zone_of
from zonal_rrt.qlearning import (NoRouteError, QHyperparams, QTable, RewardWeights, extract_sequence,
                                 q_update, resolve_weights, reward, reward_matrix, train)

from .oracles import optimal_actions, random_zone_problem, value_iteration


def quad_world():
    """100x100 world whose depth-2 kd-tree gives a 2x2 grid of zones.

    Zone ids: 0 lower-left, 1 upper-left, 2 lower-right, 3 upper-right.
    """
    obstacles = [Ball([x, y], 1.0) for x in (45.0, 55.0) for y in (45.0, 55.0)]
    world = WorldMap(Aabb([0, 0], [100, 100]), obstacles, start=[5, 5], goal=[95, 95])
    return world, build_kdtree(world, 2)


def two_state_table(q_za=0.0, q_next=0.0):
    g = ZoneGraph.from_edges(3, [(0, 1), (1, 2)], 1.0, 1.0)
    table = QTable(g, 0, 2)
    table.set(0, 1, q_za)
    table.set(1, 0, q_next)
    return table


# --- q_update arithmetic ---

def test_q_update_zero_fixed_point():
    t = two_state_table()
    assert q_update(t, 0, 1, 0.0, 1, QHyperparams()) == 0.0


def test_q_update_direct_evaluation():
    assert q_update(two_state_table(), 0, 1, 1.0, 1, QHyperparams()) == pytest.approx(0.1)
    t = two_state_table(q_za=0.5, q_next=1.0)
    assert q_update(t, 0, 1, -0.2, 1, QHyperparams()) == pytest.approx(0.52)
    assert t.get(0, 1) == pytest.approx(0.52)


def test_q_update_terminal_ignores_future():
    t = two_state_table()
    t.set(2, 1, 5.0)
    assert q_update(t, 1, 2, 1.0, 2, QHyperparams()) == pytest.approx(0.1)


# --- rewards ---

def test_reward_zero_at_goal_centre_of_empty_zone():
    world = WorldMap(Aabb([0, 0], [10, 10]), [], start=[1, 1], goal=[5, 5])
    z = Zone(1, Aabb([4, 4], [6, 6]), 0, (), 0.0)
    w = RewardWeights(1, 1, 10, c_d=1.0, c_rho=1.0)
    assert reward(z, z, goal_zone_id=0, world=world, w=w) == 0.0
    assert reward(z, z, goal_zone_id=1, world=world, w=w) == 10.0


def test_distance_reward_is_monotone():
    world = WorldMap(Aabb([0, 0], [300, 300]), [], start=[1, 1], goal=[0, 150])
    w = RewardWeights(1, 0, 10, c_d=world.bounds.diagonal(), c_rho=1.0)
    near = Zone(0, Aabb([40, 140], [60, 160]), 0, (), 0.3)
    far = Zone(1, Aabb([90, 140], [110, 160]), 0, (), 0.0)
    assert reward(near, near, 5, world, w) > reward(near, far, 5, world, w)


def test_unresolved_weights_rejected():
    z = Zone(0, Aabb([0, 0], [1, 1]), 0, (), 0.0)
    world = WorldMap(Aabb([0, 0], [10, 10]), [], start=[1, 1], goal=[5, 5])
    with pytest.raises(ValueError):
        reward(z, z, 0, world, RewardWeights())


def test_resolve_weights_defaults():
    world, dec = quad_world()
    w = resolve_weights(RewardWeights(), world, dec)
    assert w.c_d == pytest.approx(math.hypot(100, 100))
    nonzero = [z.density for z in dec.zones if z.density > 0]
    assert w.c_rho == pytest.approx(np.mean(nonzero))


def test_weight_validation():
    with pytest.raises(ValueError):
        RewardWeights(-1, 1, 1)
    with pytest.raises(ValueError):
        RewardWeights(0, 0, 0)
    with pytest.raises(ValueError):
        QHyperparams(gamma=1.0)
    with pytest.raises(ValueError):
        QHyperparams(epsilon=1.5)


# --- training ---

def test_start_in_goal_zone_gives_trivial_sequence():
    world = WorldMap(Aabb([0, 0], [100, 100]), [Ball([50, 50], 1)], start=[5, 5], goal=[10, 10])
    dec = build_kdtree(world, 2)
    graph = build_zone_graph(dec, world)
    table = train(graph, world, dec, RewardWeights(), QHyperparams())
    s = zone_of(dec, world.start)
    assert table.episodes_run == 0
    assert extract_sequence(table, graph, s, s) == [s]


def test_chain_policy_follows_chain():
    world, dec = quad_world()
    graph = ZoneGraph.from_edges(4, [(0, 1), (1, 3)], 1.0, 1.0)
    table = train(graph, world, dec, RewardWeights(), QHyperparams(seed=3))
    assert table.best_action(0) == 1 and table.best_action(1) == 3
    assert extract_sequence(table, graph, 0, 3) == [0, 1, 3]
    rewards = reward_matrix(graph, dec, world, 3, resolve_weights(RewardWeights(), world, dec))
    vi = value_iteration(graph.adjacency, rewards, 3, 0.9)
    assert table.best_action(1) in optimal_actions(vi[1], graph.adjacency[1])


def test_lattice_with_missing_edge_routes_around():
    world, dec = quad_world()
    full = [(0, 1), (0, 2), (1, 3), (2, 3)]
    for removed, via in (((0, 1), 2), ((2, 3), 1)):
        graph = ZoneGraph.from_edges(4, [e for e in full if e != removed], 1.0, 1.0)
        table = train(graph, world, dec, RewardWeights(), QHyperparams(seed=1))
        assert extract_sequence(table, graph, 0, 3) == [0, via, 3]


def test_isolated_start_is_degenerate():
    world, dec = quad_world()
    graph = ZoneGraph.from_edges(4, [(1, 3), (2, 3)], 1.0, 1.0)
    table = train(graph, world, dec, RewardWeights(), QHyperparams())
    assert table.degenerate
    assert all(v == 0.0 for v in table.values.values())
    with pytest.raises(NoRouteError):
        extract_sequence(table, graph, 0, 3)


def test_unreachable_goal_trains_then_has_no_route():
    world, dec = quad_world()
    graph = ZoneGraph.from_edges(4, [(0, 1), (0, 2)], 1.0, 1.0)
    table = train(graph, world, dec, RewardWeights(), QHyperparams(episodes=300))
    assert not table.degenerate and table.episodes_run > 0
    with pytest.raises(NoRouteError):
        extract_sequence(table, graph, 0, 3)


def test_training_is_deterministic_in_seed():
    world, dec, graph, w = random_zone_problem(5)
    a = train(graph, world, dec, w, QHyperparams(seed=11))
    b = train(graph, world, dec, w, QHyperparams(seed=11))
    assert a.values == b.values and a.episodes_run == b.episodes_run


def test_stability_window_stops_early():
    world, dec, graph, w = random_zone_problem(2)
    early = train(graph, world, dec, w, QHyperparams(episodes=5000))
    full = train(graph, world, dec, w, QHyperparams(episodes=600, stability_window=None))
    assert early.episodes_run < 5000
    assert full.episodes_run == 600


@pytest.mark.parametrize("seed", range(12))
def test_matches_value_iteration_on_extracted_path(seed):
    world, dec, graph, w = random_zone_problem(seed)
    h = QHyperparams(episodes=20_000, stability_window=None, seed=seed)
    table = train(graph, world, dec, w, h)
    start, goal = zone_of(dec, world.start), zone_of(dec, world.goal)
    vi = value_iteration(graph.adjacency, reward_matrix(graph, dec, world, goal, resolve_weights(w, world, dec)),
                         goal, h.gamma)
    seq = extract_sequence(table, graph, start, goal)
    for z in seq[:-1]:
        assert table.best_action(z) in optimal_actions(vi[z], graph.adjacency[z])


@pytest.mark.parametrize("seed", range(20))
def test_policy_invariant_to_map_scale(seed):
    world = gen_forest_map(2, 300, seed=seed)
    big = WorldMap(Aabb(world.bounds.min_corner * 2, world.bounds.max_corner * 2),
                   [Ball(o.center * 2, o.radius * 2) for o in world.obstacles],
                   world.start * 2, world.goal * 2)
    policies = []
    for wm in (world, big):
        dec = build_kdtree(wm, 3)
        graph = build_zone_graph(dec, wm)
        policies.append(train(graph, wm, dec, RewardWeights(), QHyperparams(seed=seed)).greedy_policy())
    assert policies[0] == policies[1]


def test_extract_sequence_detects_cycles():
    world, dec = quad_world()
    graph = ZoneGraph.from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)], 1.0, 1.0)
    table = QTable(graph, 0, 3)
    table.set(0, 1, 1.0)
    table.set(1, 0, 1.0)
    with pytest.raises(NoRouteError):
        extract_sequence(table, graph, 0, 3)


def test_table_serialises():
    world, dec = quad_world()
    graph = ZoneGraph.from_edges(4, [(0, 1), (1, 3)], 1.0, 1.0)
    d = train(graph, world, dec, RewardWeights(), QHyperparams(episodes=50)).to_dict()
    assert d["start"] == 0 and d["goal"] == 3
    assert [z for z, a, _ in d["values"]] == [0, 1, 1, 3]


# --- strategy flexibility ---

def _center_length(dec, seq):
    return sum(float(np.linalg.norm(dec.zones[a].center - dec.zones[b].center)) for a, b in zip(seq, seq[1:]))


def test_density_only_avoids_clutter_and_distance_only_goes_direct():
    world = corridor_detour_map()
    runs = {}
    for name, wts in (("conservative", {"w1": 0.0, "w2": 1.0, "w3": 10.0}),
                      ("greedy", {"w1": 1.0, "w2": 0.0, "w3": 10.0})):
        cfg = PlannerConfig("zonal", depth=4, weights=wts)
        res = run_planner(world, cfg, seed=0)
        assert path_is_valid(res.path, world, cfg.rrt_params(world, 0).goal_tolerance)
        runs[name] = (res.decomposition, res.path.zone_sequence)
    max_density = {k: max(dec.zones[z].density for z in seq) for k, (dec, seq) in runs.items()}
    assert max_density["conservative"] < max_density["greedy"]
    assert _center_length(*runs["greedy"]) <= _center_length(*runs["conservative"])

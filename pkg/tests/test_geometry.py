import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zonal_rrt.geometry import (Aabb, Ball, Box, CollisionChecker, WorldMap, as_point, clearance,
                                point_collides, segment_collides)


def world(obstacles, n=2, lo=-10.0, hi=10.0, agent_radius=0.0):
    return WorldMap(Aabb(np.full(n, lo), np.full(n, hi)), obstacles,
                    start=np.full(n, hi - 0.01), goal=np.full(n, hi - 0.01),
                    agent_radius=agent_radius, validate=False)


# --- hand-computed examples ---

def test_point_at_ball_center_collides():
    assert point_collides([0, 0], world([Ball([0, 0], 1.0)]))


def test_point_far_from_everything_is_free():
    assert not point_collides([5, 5], world([Ball([0, 0], 1.0), Box([-3, -3], [-2, -2])]))


def test_agent_radius_inflates_ball():
    w = world([Ball([0, 0], 1.0)], agent_radius=0.5)
    assert point_collides([1.4, 0], w)
    assert not point_collides([1.6, 0], w)


def test_point_outside_bounds_collides():
    assert point_collides([10.5, 0], world([]))


def test_box_point_uses_distance_to_box():
    w = world([Box([0, 0], [2, 2])], agent_radius=0.5)
    assert point_collides([2.4, 1.0], w)
    assert not point_collides([2.6, 1.0], w)
    # corner: distance sqrt(0.45^2 * 2) ~ 0.636 > 0.5
    assert not point_collides([2.45, 2.45], w)


def test_degenerate_segment_free():
    assert not segment_collides([5, 5], [5, 5], world([Ball([0, 0], 1.0)]))


def test_segment_through_center():
    assert segment_collides([-3, 0], [3, 0], world([Ball([0, 0], 1.0)]))


def test_segment_perpendicular_distance():
    w = world([Ball([0, 0], 1.0)])
    assert not segment_collides([-2, 1.5], [2, 1.5], w)
    assert segment_collides([-2, 0.5], [2, 0.5], w)


def test_segment_stopping_short_of_ball():
    assert not segment_collides([-5, 0], [-1.01, 0], world([Ball([0, 0], 1.0)]))
    assert segment_collides([-5, 0], [-0.99, 0], world([Ball([0, 0], 1.0)]))


def test_segment_box_slab_and_inflation():
    w = world([Box([-1, -1], [1, 1])])
    assert segment_collides([-5, 0], [5, 0], w)
    assert not segment_collides([-5, 1.2], [5, 1.2], w)
    assert segment_collides([-5, 1.2], [5, 1.2], world([Box([-1, -1], [1, 1])], agent_radius=0.3))
    # axis-parallel segment outside the slab on the fixed axis
    assert not segment_collides([1.5, -5], [1.5, 5], w)


def test_segment_diagonal_misses_box_corner():
    w = world([Box([0, 0], [1, 1])])
    assert not segment_collides([1.2, 0], [2.2, 1], w)
    assert segment_collides([0.5, -1], [1.5, 2], w)


def test_clearance_values():
    assert clearance([0, 0], world([Ball([0, 0], 1.0)])) == pytest.approx(-1.0)
    assert clearance([3, 0], world([Ball([0, 0], 1.0)])) == pytest.approx(2.0)
    w = world([Ball([0, 0], 1.0), Ball([4.3, 0], 1.0)])
    assert clearance([3, 0], w) == pytest.approx(0.3)
    assert clearance([0, 0], world([])) == math.inf


def test_clearance_box_inside_and_outside():
    w = world([Box([0, 0], [2, 4])])
    assert clearance([1, 1], w) == pytest.approx(-1.0)
    assert clearance([5, 8], w) == pytest.approx(5.0)


def test_dimension_mismatch_raises():
    with pytest.raises(ValueError):
        point_collides([0, 0, 0], world([Ball([0, 0], 1.0)]))
    with pytest.raises(ValueError):
        segment_collides([0, 0], [1, 1, 1], world([]))


def test_types_validate():
    with pytest.raises(ValueError):
        Ball([0, 0], 0.0)
    with pytest.raises(ValueError):
        Box([0, 0], [1, 0])
    with pytest.raises(ValueError):
        as_point([0.0, float("nan")])
    with pytest.raises(ValueError):
        as_point(np.zeros(7))
    with pytest.raises(ValueError):
        Aabb([1, 0], [0, 1])


def test_worldmap_rejects_start_in_obstacle():
    with pytest.raises(ValueError):
        WorldMap(Aabb([0, 0], [10, 10]), [Ball([1, 1], 1.0)], start=[1, 1], goal=[9, 9])
    with pytest.raises(ValueError):
        WorldMap(Aabb([0, 0], [10, 10]), [Ball([11, 1], 1.0)], start=[5, 5], goal=[9, 9])


def test_measures():
    assert Ball([0, 0], 2.0).measure() == pytest.approx(4 * math.pi)
    assert Ball([0, 0, 0], 1.0).measure() == pytest.approx(4 / 3 * math.pi)
    assert Ball(np.zeros(6), 1.0).measure() == pytest.approx(math.pi ** 3 / 6)
    assert Box([0, 0, 0], [1, 2, 3]).measure() == pytest.approx(6.0)
    np.testing.assert_allclose(Box([0, 0], [2, 4]).centroid(), [1, 2])


def test_crop_preserves_answers_inside_region():
    rng = np.random.default_rng(3)
    obs = [Ball(rng.uniform(-10, 10, 2), rng.uniform(0.3, 2)) for _ in range(40)]
    obs += [Box(c - h, c + h) for c, h in zip(rng.uniform(-10, 10, (20, 2)), rng.uniform(0.2, 1.5, (20, 2)))]
    w = world(obs, agent_radius=0.2)
    region = Aabb([-3, -4], [4, 2])
    local = w.checker.crop(region)
    assert local.size < w.checker.size
    for _ in range(500):
        a, b = region.sample(rng, 2)
        assert local.segment_hits(a, b) == w.checker.segment_hits(a, b)


def test_segments_hit_matches_single_checks():
    rng = np.random.default_rng(4)
    obs = [Ball(rng.uniform(-10, 10, 3), rng.uniform(0.3, 2)) for _ in range(30)]
    obs += [Box(c - 1, c + 1) for c in rng.uniform(-10, 10, (10, 3))]
    ch = world(obs, n=3).checker
    a = rng.uniform(-10, 10, 3)
    ends = rng.uniform(-10, 10, (200, 3))
    expect = [ch.segment_hits_inside(a, e) for e in ends]
    assert ch.segments_hit(a, ends).tolist() == expect


# --- dense-sampling oracle ---

def _random_instance(rng, n):
    obstacles = []
    for _ in range(rng.integers(1, 4)):
        c = rng.uniform(-3, 3, n)
        if rng.random() < 0.5:
            obstacles.append(Ball(c, rng.uniform(0.3, 2.0)))
        else:
            h = rng.uniform(0.2, 1.5, n)
            obstacles.append(Box(c - h, c + h))
    ch = CollisionChecker.from_obstacles(obstacles, Aabb(np.full(n, -10.0), np.full(n, 10.0)))
    a = rng.uniform(-5, 5, n)
    d = rng.normal(size=n)
    b = a + d / np.linalg.norm(d) * rng.uniform(0.0, 4.0)
    return ch, a, b


@pytest.mark.parametrize("n", [2, 3, 6])
def test_segment_check_agrees_with_dense_sampling(n):
    rng = np.random.default_rng(100 + n)
    for _ in range(10_000):
        ch, a, b = _random_instance(rng, n)
        # samples 1e-3 apart along the segment (and never coarser than 1e-3 in t)
        m = max(1001, math.ceil(np.linalg.norm(b - a) / 1e-3) + 1)
        t = np.linspace(0.0, 1.0, m)
        fine = np.linspace(0.0, 1.0, 20 * m)
        exact = ch.segment_hits(a, b)
        oracle = bool(ch.points_hit(a + t[:, None] * (b - a)).any())
        if oracle:
            assert exact
        elif exact:
            depth = -ch.clearances(a + fine[:, None] * (b - a)).min()
            assert depth < 1e-3


@settings(max_examples=300, deadline=None)
@given(st.lists(st.tuples(st.floats(-8, 8), st.floats(-8, 8), st.floats(0.1, 3)), min_size=1, max_size=6),
       st.floats(-9.9, 9.9), st.floats(-9.9, 9.9))
def test_clearance_sign_matches_point_collides(balls, x, y):
    obs = [Ball([cx, cy], r) for cx, cy, r in balls]
    w = world(obs)
    c = clearance([x, y], w)
    if abs(c) > 1e-9:
        assert (c > 0) == (not point_collides([x, y], w))


def test_point_collides_permutation_invariant():
    rng = np.random.default_rng(8)
    obs = [Ball(rng.uniform(-9, 9, 2), rng.uniform(0.2, 2)) for _ in range(30)]
    obs += [Box(c - 0.7, c + 0.7) for c in rng.uniform(-9, 9, (10, 2))]
    w1 = world(obs, agent_radius=0.1)
    w2 = world([obs[i] for i in rng.permutation(len(obs))], agent_radius=0.1)
    pts = rng.uniform(-10, 10, (2000, 2))
    assert [point_collides(p, w1) for p in pts] == [point_collides(p, w2) for p in pts]

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pgbrrt.environment import (
    Box,
    Environment,
    ScenarioError,
    Sphere,
    builtin_scenario,
    builtin_scenario_names,
    load_scenario,
    serialize_scenario,
)


def _env(obstacles=(), lo=(0.0, 0.0), hi=(10.0, 10.0), start=(1.0, 5.0),
         goal=(9.0, 5.0)):
    return Environment(
        bounds_min=np.asarray(lo, dtype=float),
        bounds_max=np.asarray(hi, dtype=float),
        obstacles=tuple(obstacles),
        start=np.asarray(start, dtype=float),
        goal=np.asarray(goal, dtype=float),
        goal_radius=0.5,
    )


class TestIsFree:
    def test_no_obstacles_inside_bounds(self, empty_env):
        assert empty_env.is_free(np.array([3.0, 3.0]))

    def test_box_center_blocked(self, box_env):
        assert not box_env.is_free(np.array([5.0, 5.0]))

    def test_box_face_blocked(self, box_env):
        # closed obstacles: a point on the face has distance exactly 0
        z = np.array([4.0, 5.0])
        assert box_env.nearest_obstacle_distance(z) == 0.0
        assert not box_env.is_free(z)

    def test_outside_bounds_not_free(self, empty_env):
        assert not empty_env.is_free(np.array([-0.1, 5.0]))
        assert not empty_env.is_free(np.array([5.0, 10.1]))


class TestNearestObstacleDistance:
    def test_no_obstacles_is_infinite(self, empty_env):
        assert empty_env.nearest_obstacle_distance(np.array([1.0, 1.0])) == math.inf

    def test_inside_box_is_zero(self, box_env):
        assert box_env.nearest_obstacle_distance(np.array([5.0, 5.0])) == 0.0

    def test_corner_distance_matches_boundary_sampling(self):
        env = _env([Box(np.array([2.0, -1.0]), np.array([3.0, 1.0]))],
                   lo=(-5.0, -5.0), hi=(5.0, 5.0), start=(-4.0, 0.0),
                   goal=(4.0, 4.0))
        z = np.array([0.0, 0.0])
        got = env.nearest_obstacle_distance(z)
        # oracle: dense sampling of the box boundary
        ts = np.linspace(0.0, 1.0, 4001)
        edges = []
        for a, b in [((2, -1), (3, -1)), ((3, -1), (3, 1)),
                     ((3, 1), (2, 1)), ((2, 1), (2, -1))]:
            a, b = np.asarray(a, float), np.asarray(b, float)
            edges.append(a[None, :] + ts[:, None] * (b - a)[None, :])
        pts = np.vstack(edges)
        oracle = np.min(np.linalg.norm(pts - z, axis=1))
        assert got == pytest.approx(2.0)
        assert abs(got - oracle) <= 1e-6

    def test_sphere_distance(self, sphere_env):
        z = np.array([5.0, 1.0])
        assert sphere_env.nearest_obstacle_distance(z) == pytest.approx(4.0 - 1.5)


class TestSampleFree:
    def test_seeded_determinism(self, empty_env):
        a = empty_env.sample_free(np.random.default_rng(7))
        b = empty_env.sample_free(np.random.default_rng(7))
        assert np.array_equal(a, b)

    def test_samples_always_free_under_heavy_cover(self):
        env = _env([Box(np.array([0.0, 0.0]), np.array([9.9, 10.0]))],
                   start=(9.95, 5.0), goal=(9.95, 9.0))
        rng = np.random.default_rng(1)
        for _ in range(200):
            assert env.is_free(env.sample_free(rng))

    def test_quadrant_fractions_match_free_area(self):
        # unit square with one quarter-area box; remaining three quadrants
        # should each collect about 1/3 of the samples
        env = _env([Box(np.array([0.5, 0.5]), np.array([1.0, 1.0]))],
                   lo=(0.0, 0.0), hi=(1.0, 1.0), start=(0.25, 0.25),
                   goal=(0.75, 0.25))
        rng = np.random.default_rng(3)
        pts = np.array([env.sample_free(rng) for _ in range(100_000)])
        q = [
            np.mean((pts[:, 0] < 0.5) & (pts[:, 1] < 0.5)),
            np.mean((pts[:, 0] >= 0.5) & (pts[:, 1] < 0.5)),
            np.mean((pts[:, 0] < 0.5) & (pts[:, 1] >= 0.5)),
        ]
        for frac in q:
            assert abs(frac - 1.0 / 3.0) < 0.02


class TestSegmentFree:
    def test_degenerate_segment(self, empty_env):
        z = np.array([2.0, 2.0])
        assert empty_env.segment_free(z, z, 0.01)

    def test_crossing_box_face(self, box_env):
        a = np.array([1.0, 5.0])
        b = np.array([9.0, 5.0])
        assert not box_env.segment_free(a, b, 0.01)
        # oracle: exact slab intersection of the parametric segment
        d = b - a
        t0, t1 = 0.0, 1.0
        for k, (lo, hi) in enumerate([(4.0, 6.0), (3.0, 7.0)]):
            ta = (lo - a[k]) / d[k] if d[k] != 0 else -math.inf
            tb = (hi - a[k]) / d[k] if d[k] != 0 else math.inf
            ta, tb = min(ta, tb), max(ta, tb)
            t0, t1 = max(t0, ta), min(t1, tb)
        assert t0 <= t1  # the oracle agrees there is an intersection

    def test_sphere_tangent_counts_as_hit(self):
        env = _env([Sphere(np.array([5.0, 5.0]), 2.0)], start=(1.0, 1.0),
                   goal=(9.0, 1.0))
        # horizontal line y = 3 touches the sphere at exactly one point
        assert not env.segment_free(np.array([1.0, 3.0]), np.array([9.0, 3.0]), 0.01)
        assert env.segment_free(np.array([1.0, 2.9]), np.array([9.0, 2.9]), 0.01)

    def test_clear_corridor(self, box_env):
        assert box_env.segment_free(np.array([1.0, 1.0]), np.array([9.0, 1.0]), 0.01)

    def test_rejects_nonpositive_resolution(self, empty_env):
        with pytest.raises(ValueError):
            empty_env.segment_free(np.array([1.0, 1.0]), np.array([2.0, 2.0]), 0.0)

    @given(st.tuples(st.floats(0.2, 9.8), st.floats(0.2, 9.8)),
           st.tuples(st.floats(0.2, 9.8), st.floats(0.2, 9.8)))
    @settings(max_examples=60, deadline=None)
    def test_symmetry(self, a, b):
        env = _env([Box(np.array([4.0, 3.0]), np.array([6.0, 7.0])),
                    Sphere(np.array([2.0, 8.0]), 1.0)])
        a = np.asarray(a)
        b = np.asarray(b)
        assert env.segment_free(a, b, 0.05) == env.segment_free(b, a, 0.05)

    @given(st.tuples(st.floats(0.2, 9.8), st.floats(0.2, 9.8)),
           st.tuples(st.floats(0.2, 9.8), st.floats(0.2, 9.8)))
    @settings(max_examples=40, deadline=None)
    def test_exact_agrees_with_dense_sampling(self, a, b):
        env = _env([Box(np.array([4.0, 3.0]), np.array([6.0, 7.0])),
                    Sphere(np.array([2.0, 8.0]), 1.0)])
        a = np.asarray(a)
        b = np.asarray(b)
        exact = env.segment_free(a, b, 0.05)
        sampled = env.segment_free_sampled(a, b, 1e-4)
        # the dense sampler can miss razor-thin clips, never the reverse
        if sampled is False:
            assert exact is False


class TestFreeMeasureEstimate:
    def test_empty_is_full_volume(self, empty_env, rng):
        est = empty_env.free_measure_estimate(100_000, rng)
        assert abs(est - 100.0) / 100.0 < 0.01

    def test_quarter_box(self, rng):
        env = _env([Box(np.array([0.0, 0.0]), np.array([0.5, 0.5]))],
                   lo=(0.0, 0.0), hi=(1.0, 1.0), start=(0.75, 0.75),
                   goal=(0.9, 0.9))
        est = env.free_measure_estimate(100_000, rng)
        assert abs(est - 0.75) < 0.01

    def test_single_sample_is_all_or_nothing(self, box_env, rng):
        est = box_env.free_measure_estimate(1, rng)
        assert est in (0.0, 100.0)


class TestLipschitz:
    @given(st.tuples(st.floats(0.0, 10.0), st.floats(0.0, 10.0)),
           st.tuples(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5)))
    @settings(max_examples=60, deadline=None)
    def test_distance_is_1_lipschitz(self, z, dz):
        env = _env([Box(np.array([4.0, 3.0]), np.array([6.0, 7.0])),
                    Sphere(np.array([2.0, 8.0]), 1.0)])
        z = np.asarray(z)
        w = z + np.asarray(dz)
        d1 = env.nearest_obstacle_distance(z)
        d2 = env.nearest_obstacle_distance(w)
        assert abs(d1 - d2) <= np.linalg.norm(z - w) + 1e-9


class TestScenarioIO:
    def test_round_trip(self):
        env = builtin_scenario("cluttered")
        text = serialize_scenario(env)
        again = load_scenario(text)
        assert serialize_scenario(again) == text

    def test_start_inside_obstacle_rejected(self):
        doc = {
            "name": "bad", "dimension": 2,
            "bounds": {"min": [0, 0], "max": [10, 10]},
            "start": [5.0, 5.0], "goal": [9.0, 9.0], "goal_radius": 0.5,
            "obstacles": [{"type": "box", "min": [4, 4], "max": [6, 6]}],
        }
        with pytest.raises(ScenarioError, match="start"):
            load_scenario(json.dumps(doc))

    def test_dimension_mismatch_rejected(self):
        doc = {
            "name": "bad", "dimension": 3,
            "bounds": {"min": [0, 0, 0], "max": [10, 10, 10]},
            "start": [1, 1, 1], "goal": [9, 9, 9], "goal_radius": 0.5,
            "obstacles": [{"type": "box", "min": [4, 4], "max": [6, 6]}],
        }
        with pytest.raises(ScenarioError):
            load_scenario(json.dumps(doc))

    def test_builtin_scenarios_load(self):
        names = builtin_scenario_names()
        assert {"open", "corridor", "cluttered", "enclosed"} <= set(names)
        for name in names:
            env = builtin_scenario(name)
            assert env.dimension in (2, 3)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pgbrrt.environment import Box, Environment
from pgbrrt.tree import MotionTree, near_radius


def _open_env(lo=(0.0, 0.0), hi=(10.0, 10.0)):
    return Environment(
        bounds_min=np.asarray(lo, dtype=float),
        bounds_max=np.asarray(hi, dtype=float),
        obstacles=(),
        start=np.asarray([1.0, 1.0]),
        goal=np.asarray([9.0, 9.0]),
        goal_radius=0.5,
    )


class TestNearRadius:
    def test_single_vertex_uses_max_radius(self):
        assert near_radius(1, 2, 5.0, max_radius=14.14) == 14.14

    def test_known_value(self):
        # gamma = 2, n = 100, d = 2
        got = near_radius(100, 2, 2.0, max_radius=100.0)
        want = 2.0 * math.sqrt(math.log(100) / 100)
        assert got == pytest.approx(want, rel=1e-12)
        assert got == pytest.approx(0.4292, abs=1e-4)

    def test_strictly_decreasing_beyond_e(self):
        radii = [near_radius(n, 2, 2.0, max_radius=100.0) for n in range(3, 200)]
        assert all(a > b for a, b in zip(radii, radii[1:]))


class TestNearestVertex:
    def test_single_vertex(self):
        t = MotionTree(np.array([1.0, 1.0]))
        assert t.nearest_vertex(np.array([5.0, 5.0])) == 0

    def test_exact_hit(self):
        t = MotionTree(np.array([1.0, 1.0]))
        t.add(np.array([2.0, 2.0]), 0)
        assert t.nearest_vertex(np.array([2.0, 2.0])) == 1

    def test_matches_linear_scan(self, rng):
        t = MotionTree(np.array([5.0, 5.0]))
        pts = [np.array([5.0, 5.0])]
        for _ in range(50):
            p = rng.uniform(0, 10, 2)
            t.add(p, 0)
            pts.append(p)
        pts = np.array(pts)
        for _ in range(100):
            q = rng.uniform(0, 10, 2)
            want = int(np.argmin(np.linalg.norm(pts - q, axis=1)))
            assert t.nearest_vertex(q) == want

    def test_tie_breaks_to_lowest_index(self):
        t = MotionTree(np.array([0.0, 0.0]))
        t.add(np.array([2.0, 0.0]), 0)
        t.add(np.array([-2.0, 0.0]), 0)
        # both non-root vertices are at distance 1 from (1, 0)... not quite:
        # query (0, 2) is equidistant from vertices 1 and 2
        assert t.nearest_vertex(np.array([0.0, 2.0])) == 0
        assert t.nearest_vertex(np.array([0.0, -10.0])) == 0


class TestNeighboringVertices:
    def test_radius_below_spacing_is_empty(self):
        t = MotionTree(np.array([0.0, 0.0]))
        t.add(np.array([5.0, 0.0]), 0)
        assert t.neighboring_vertices(np.array([2.5, 0.0]), 1.0).size == 0

    def test_coincident_vertex_included(self):
        t = MotionTree(np.array([0.0, 0.0]))
        near = t.neighboring_vertices(np.array([0.0, 0.0]), 0.5)
        assert 0 in near

    def test_matches_distance_filter(self, rng):
        t = MotionTree(np.array([5.0, 5.0]))
        pts = [np.array([5.0, 5.0])]
        for _ in range(100):
            p = rng.uniform(0, 10, 2)
            t.add(p, 0)
            pts.append(p)
        pts = np.array(pts)
        for _ in range(50):
            q = rng.uniform(0, 10, 2)
            r = rng.uniform(0.5, 4.0)
            want = np.nonzero(np.linalg.norm(pts - q, axis=1) <= r)[0]
            got = t.neighboring_vertices(q, r)
            assert np.array_equal(np.sort(got), want)


class TestListSorting:
    def test_empty(self):
        t = MotionTree(np.array([0.0, 0.0]))
        cand = t.list_sorting(np.array([1.0, 1.0]), np.array([], dtype=int))
        assert cand.vertices.size == 0

    def test_singleton(self):
        t = MotionTree(np.array([0.0, 0.0]))
        cand = t.list_sorting(np.array([1.0, 0.0]), np.array([0]))
        assert list(cand.vertices) == [0]
        assert cand.total_costs[0] == pytest.approx(1.0)

    def test_matches_recomputed_sort(self, rng):
        t = MotionTree(np.array([5.0, 5.0]))
        for _ in range(10):
            t.add(rng.uniform(0, 10, 2), 0)
        q = rng.uniform(0, 10, 2)
        near = np.arange(t.size)
        cand = t.list_sorting(q, near)
        # oracle: recompute J' = cost_to_root + link length, argsort ascending
        totals = np.array([t.cost[v] + np.linalg.norm(t.point(v) - q) for v in near])
        order = np.argsort(totals, kind="stable")
        assert np.allclose(cand.total_costs, totals[order])
        assert np.all(np.diff(cand.total_costs) >= 0)


class TestPickBestParent:
    def test_unblocked_best(self):
        env = _open_env()
        t = MotionTree(np.array([1.0, 1.0]))
        t.add(np.array([2.0, 2.0]), 0)
        cand = t.list_sorting(np.array([3.0, 1.0]), np.arange(2))
        # nothing blocks the cheapest entry, so it is returned as-is
        assert t.pick_best_parent(env, cand, 0.05) == cand.vertices[0] == 0

    def test_all_blocked(self):
        # candidate surrounded by a box annulus: every link collides
        env = Environment(
            bounds_min=np.array([0.0, 0.0]),
            bounds_max=np.array([10.0, 10.0]),
            obstacles=(Box(np.array([4.0, 4.0]), np.array([6.0, 4.4])),
                       Box(np.array([4.0, 5.6]), np.array([6.0, 6.0])),
                       Box(np.array([4.0, 4.0]), np.array([4.4, 6.0])),
                       Box(np.array([5.6, 4.0]), np.array([6.0, 6.0]))),
            start=np.array([1.0, 1.0]),
            goal=np.array([9.0, 9.0]),
            goal_radius=0.5,
        )
        t = MotionTree(np.array([1.0, 1.0]))
        t.add(np.array([9.0, 5.0]), 0)
        cand = t.list_sorting(np.array([5.0, 5.0]), np.arange(2))
        assert t.pick_best_parent(env, cand, 0.05) is None

    def test_best_blocked_second_free(self):
        env = Environment(
            bounds_min=np.array([0.0, 0.0]),
            bounds_max=np.array([10.0, 10.0]),
            obstacles=(Box(np.array([4.0, 0.0]), np.array([4.5, 4.0])),),
            start=np.array([1.0, 1.0]),
            goal=np.array([9.0, 9.0]),
            goal_radius=0.5,
        )
        t = MotionTree(np.array([1.0, 1.0]))    # blocked by the wall
        t.add(np.array([5.0, 6.0]), 0)          # clear from above
        q = np.array([6.0, 1.0])
        cand = t.list_sorting(q, np.arange(2))
        got = t.pick_best_parent(env, cand, 0.05)
        # oracle: exhaustive feasible minimum
        feas = [v for v in range(2)
                if env.segment_free(t.point(v), q, 0.05)]
        want = min(feas, key=lambda v: t.cost[v] + np.linalg.norm(t.point(v) - q))
        assert got == want == 1


class TestInsertAndCost:
    def test_unit_edge(self):
        t = MotionTree(np.array([0.0, 0.0]))
        v = t.add(np.array([1.0, 0.0]), 0)
        assert t.cost[v] == pytest.approx(1.0)

    def test_chain_additivity(self):
        t = MotionTree(np.array([0.0, 0.0]))
        a = t.add(np.array([1.0, 0.0]), 0)
        b = t.add(np.array([2.0, 0.0]), a)
        assert t.cost[b] == pytest.approx(2.0)

    def test_random_inserts_pass_audit(self, rng):
        env = _open_env()
        t = MotionTree(np.array([1.0, 1.0]))
        for _ in range(200):
            p = rng.uniform(0, 10, 2)
            parent = t.nearest_vertex(p)
            t.add(p, parent)
        assert t.audit(env, 0.05) == []


class TestRewire:
    def test_no_improvement_no_change(self):
        env = _open_env()
        t = MotionTree(np.array([0.0, 0.0]))
        v1 = t.add(np.array([0.0, 2.0]), 0)
        z = t.add(np.array([1.0, 0.0]), 0)
        # sqrt(5) > 2 so routing v1 through z cannot help
        n = t.rewire(env, z, np.array([0, v1]), 0.05)
        assert n == 0
        assert t.parent[v1] == 0
        assert t.cost[v1] == pytest.approx(2.0)

    def test_exact_tie_does_not_rewire(self):
        env = _open_env()
        t = MotionTree(np.array([0.0, 0.0]))
        v1 = t.add(np.array([0.0, 2.0]), 0)
        z = t.add(np.array([0.0, 1.0]), 0)
        # 1 + 1 = 2 exactly equals the current cost: strict inequality required
        n = t.rewire(env, z, np.array([0, v1]), 0.05)
        assert n == 0
        assert t.parent[v1] == 0

    def test_improvement_rewires_and_propagates(self):
        env = _open_env()
        t = MotionTree(np.array([0.0, 0.0]))
        detour = t.add(np.array([0.0, 8.0]), 0)      # cost 8
        v1 = t.add(np.array([3.0, 4.0]), detour)     # cost 8 + 5 = 13
        child = t.add(np.array([3.0, 5.0]), v1)      # cost 14, rides on v1
        z = t.add(np.array([3.0, 0.0]), 0)           # cost 3
        n = t.rewire(env, z, np.array([v1]), 0.05)
        assert n == 1
        assert t.parent[v1] == z
        assert t.cost[v1] == pytest.approx(7.0)
        assert t.cost[child] == pytest.approx(8.0)
        assert t.audit(env, 0.05) == []


class TestExtractPath:
    def test_root_path(self):
        t = MotionTree(np.array([2.0, 2.0]))
        path = t.extract_path(0)
        assert path.shape == (1, 2)

    def test_chain_of_three(self):
        t = MotionTree(np.array([0.0, 0.0]))
        a = t.add(np.array([1.0, 0.0]), 0)
        b = t.add(np.array([2.0, 0.0]), a)
        path = t.extract_path(b)
        assert path.shape == (3, 2)
        assert np.allclose(path[0], [0.0, 0.0])
        assert np.allclose(path[-1], [2.0, 0.0])

    def test_resummed_length_matches_cost(self, rng):
        t = MotionTree(np.array([5.0, 5.0]))
        for _ in range(80):
            p = rng.uniform(0, 10, 2)
            t.add(p, t.nearest_vertex(p))
        for v in rng.integers(0, t.size, 20):
            path = t.extract_path(int(v))
            length = float(np.sum(np.linalg.norm(np.diff(path, axis=0), axis=1)))
            assert abs(length - t.cost[int(v)]) <= 1e-9


class TestDump:
    def test_dump_row_count(self, rng):
        t = MotionTree(np.array([0.0, 0.0]))
        for _ in range(10):
            p = rng.uniform(0, 10, 2)
            t.add(p, t.nearest_vertex(p))
        lines = t.dump().splitlines()
        assert len(lines) == t.size


@given(st.integers(2, 5000))
@settings(max_examples=50, deadline=None)
def test_near_radius_formula_property(n):
    got = near_radius(n, 2, 1.7, max_radius=1e9)
    assert got == pytest.approx(1.7 * (math.log(n) / n) ** 0.5, rel=1e-12)

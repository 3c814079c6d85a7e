"""The six planner loops and their shared sub-heuristics.

Unidirectional family (single tree rooted at the start, goal reached when an
inserted vertex lands in the goal ball):
  * rrt-star        - baseline, no sample guidance
  * p-rrt-star      - samples descend toward the goal before insertion

Bidirectional greedy family (two trees, roles swap every iteration, a greedy
connect probe bridges them):
  * b-rrt-star
  * pb-rrt-star     - samples descend toward alternating poles

Bidirectional intelligent family (two fixed trees, each sample inserted into
whichever tree offers the cheaper feasible parent):
  * ib-rrt-star
  * pib-rrt-star    - samples descend toward alternating poles
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from . import __version__
from .defaults import get_defaults
from .environment import Environment
from .potential import PotentialParams, bpg, rgd
from .tree import CandidateList, MotionTree, near_radius

__all__ = [
    "PLANNER_KINDS",
    "PlannerConfig",
    "RunResult",
    "steer",
    "extend",
    "connect",
    "get_best_tree_parent",
    "run_planner",
    "concatenate_solution",
]

PLANNER_KINDS = (
    "rrt-star",
    "p-rrt-star",
    "b-rrt-star",
    "ib-rrt-star",
    "pb-rrt-star",
    "pib-rrt-star",
)

_GUIDED = {"p-rrt-star", "pb-rrt-star", "pib-rrt-star"}
_IMPROVE_TOL = 1e-12


@dataclass
class PlannerConfig:
    """One planner run, fully specified. "auto" fields are resolved against
    the environment (see defaults.py for the scale fractions)."""

    kind: str = "pib-rrt-star"
    gamma: float | str = "auto"
    eps_steer: float | str = "auto"
    collision_resolution: float | str = "auto"
    max_iterations: int = 200_000
    seed: int = 0
    potential: PotentialParams | None = None
    stop_on_first: bool = False
    stop_at_cost: float | None = None
    cost_trace_stride: int = 100
    radius_log_base: float = math.e
    max_radius: float | str = "auto"

    def __post_init__(self):
        if self.kind not in PLANNER_KINDS:
            raise ValueError(f"unknown planner kind {self.kind!r}; choose from {PLANNER_KINDS}")
        for name in ("gamma", "eps_steer", "collision_resolution", "max_radius"):
            v = getattr(self, name)
            if v != "auto" and (not isinstance(v, (int, float)) or v <= 0):
                raise ValueError(f"{name} must be 'auto' or a positive number, got {v!r}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.cost_trace_stride < 1:
            raise ValueError("cost_trace_stride must be >= 1")

    def echo(self) -> dict:
        doc = asdict(self)
        if self.potential is not None:
            doc["potential"] = asdict(self.potential)
        return doc


@dataclass
class RunResult:
    planner: str
    scenario: str
    best_path: np.ndarray | None
    best_cost: float
    first_solution_iteration: int | None
    first_solution_time: float | None
    total_iterations: int
    wall_time: float
    rewire_count: int
    theta: float
    cost_trace: list = field(default_factory=list)
    time_trace: list = field(default_factory=list)
    failed: bool = True
    config: dict = field(default_factory=dict)
    version: str = __version__

    def to_dict(self) -> dict:
        return {
            "planner": self.planner,
            "scenario": self.scenario,
            "best_path": None if self.best_path is None else self.best_path.tolist(),
            "best_cost": None if math.isinf(self.best_cost) else self.best_cost,
            "first_solution_iteration": self.first_solution_iteration,
            "first_solution_time": self.first_solution_time,
            "total_iterations": self.total_iterations,
            "wall_time": self.wall_time,
            "rewire_count": self.rewire_count,
            "theta": self.theta,
            "cost_trace": [[int(i), float(c)] for i, c in self.cost_trace],
            "time_trace": [[int(i), float(t)] for i, t in self.time_trace],
            "failed": self.failed,
            "config": self.config,
            "version": self.version,
        }


# ---------------------------------------------------------------------------
# shared sub-heuristics


def steer(a: np.ndarray, b: np.ndarray, env: Environment, resolution: float):
    """Straight segment a->b when collision-free, else None."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if env.segment_free(a, b, resolution):
        return a, b
    return None


def extend(
    z_nearest: np.ndarray,
    z_target: np.ndarray,
    eps_steer: float,
    env: Environment,
    resolution: float,
) -> np.ndarray | None:
    """Step from z_nearest toward z_target, clamped at eps_steer.

    Returns the new point only when it is free and the connecting segment is
    collision-free.
    """
    z_nearest = np.asarray(z_nearest, dtype=float)
    z_target = np.asarray(z_target, dtype=float)
    delta = z_target - z_nearest
    dist = math.sqrt(float(delta @ delta))
    if dist == 0.0:
        return z_target.copy()
    z_new = z_target.copy() if dist <= eps_steer else z_nearest + (eps_steer / dist) * delta
    if env.is_free(z_new) and env.segment_free(z_nearest, z_new, resolution):
        return z_new
    return None


@dataclass(frozen=True)
class Bridge:
    """Feasible link from a tree-b parent to a point of the other tree."""

    parent: int
    link_length: float
    cost_from_root: float  # tree-b root -> parent -> endpoint


def connect(
    env: Environment,
    z_new: np.ndarray,
    z_conn: int,
    tree_b: MotionTree,
    eps_steer: float,
    gamma: float,
    resolution: float,
    max_radius: float,
    radius_log_base: float = math.e,
) -> Bridge | None:
    """Greedy RRT-connect probe from tree_b toward z_new.

    Repeatedly extends from the nearest tree_b vertex toward z_new; if z_new
    is reached (within ``resolution``), the final link's parent is chosen by
    ascending-cost feasibility over tree_b's near set.
    """
    cur = tree_b.point(z_conn).copy()
    _w = cur - z_new
    reach = math.sqrt(float(_w @ _w))
    while reach > resolution:
        nxt = extend(cur, z_new, eps_steer, env, resolution)
        if nxt is None:
            return None
        cur = nxt
        _w = cur - z_new
        reach = math.sqrt(float(_w @ _w))
        if reach == 0.0:
            break
    r = near_radius(tree_b.size, tree_b.dimension, gamma, max_radius, radius_log_base)
    near = tree_b.neighboring_vertices(z_new, r)
    if near.shape[0] == 0:
        near = np.array([z_conn], dtype=int)
    cand = tree_b.list_sorting(z_new, near)
    parent = tree_b.pick_best_parent(env, cand, resolution)
    if parent is None:
        return None
    _wl = tree_b.point(parent) - z_new
    link = math.sqrt(float(_wl @ _wl))
    return Bridge(parent, link, tree_b.cost[parent] + link)


@dataclass(frozen=True)
class BestTreeParent:
    parent: int
    in_first: bool  # parent lives in the first tree passed to get_best_tree_parent
    cost_first: float
    cost_second: float
    parent_first: int | None
    parent_second: int | None
    end_to_end_cost: float | None  # set only when a joining path exists


def get_best_tree_parent(
    env: Environment,
    list_a: CandidateList,
    list_b: CandidateList,
    connection: bool,
    tree_a: MotionTree,
    tree_b: MotionTree,
    resolution: float,
) -> BestTreeParent | None:
    """Cheapest feasible parent across both trees for the shared query point.

    When ``connection`` holds and both sides have a feasible candidate, the
    query point bridges the two best parents into an end-to-end solution of
    cost c_a + c_b (each side's cost already includes the link to the query).
    """
    pa = tree_a.pick_best_parent(env, list_a, resolution) if not list_a.empty else None
    pb = tree_b.pick_best_parent(env, list_b, resolution) if not list_b.empty else None
    ca = cb = math.inf
    if pa is not None:
        ca = float(list_a.total_costs[np.nonzero(list_a.vertices == pa)[0][0]])
    if pb is not None:
        cb = float(list_b.total_costs[np.nonzero(list_b.vertices == pb)[0][0]])
    if pa is None and pb is None:
        return None
    in_first = ca <= cb
    end_to_end = ca + cb if (connection and pa is not None and pb is not None) else None
    return BestTreeParent(
        parent=int(pa if in_first else pb),
        in_first=in_first,
        cost_first=ca,
        cost_second=cb,
        parent_first=pa,
        parent_second=pb,
        end_to_end_cost=end_to_end,
    )


def concatenate_solution(
    path_start_side: np.ndarray, path_goal_side: np.ndarray, via: np.ndarray | None = None
) -> np.ndarray:
    """Join a start-rooted path and a goal-rooted path into one start->goal path.

    Both inputs run root-outwards; the goal-side one is reversed. ``via``
    optionally inserts the bridging point between them.
    """
    parts = [np.asarray(path_start_side, dtype=float)]
    if via is not None:
        parts.append(np.asarray(via, dtype=float)[None, :])
    parts.append(np.asarray(path_goal_side, dtype=float)[::-1])
    return np.vstack(parts)


def path_length(path: np.ndarray) -> float:
    return float(np.sum(np.linalg.norm(np.diff(path, axis=0), axis=1)))


# ---------------------------------------------------------------------------
# config resolution


@dataclass(frozen=True)
class _Resolved:
    gamma: float
    eps_steer: float
    resolution: float
    max_radius: float
    potential: PotentialParams


def _resolve(env: Environment, cfg: PlannerConfig) -> _Resolved:
    table = get_defaults()
    diag = env.diagonal
    if cfg.gamma == "auto":
        mu = env.free_measure_estimate(
            int(table["gamma_measure_samples"]), np.random.default_rng(0x5EED)
        )
        gamma = table["gamma_scale"] * mu ** (1.0 / env.dimension)
    else:
        gamma = float(cfg.gamma)
    eps_steer = (
        table["eps_steer_frac"] * diag if cfg.eps_steer == "auto" else float(cfg.eps_steer)
    )
    resolution = (
        table["collision_resolution_frac"] * diag
        if cfg.collision_resolution == "auto"
        else float(cfg.collision_resolution)
    )
    max_radius = diag if cfg.max_radius == "auto" else float(cfg.max_radius)
    potential = cfg.potential or PotentialParams(
        k_p=table["k_p"],
        eps_pot=table["eps_pot_frac"] * diag,
        n_steps=int(table["n_steps"]),
        d_obs_star=table["d_obs_frac"] * diag,
    )
    return _Resolved(gamma, eps_steer, resolution, max_radius, potential)


# ---------------------------------------------------------------------------
# run bookkeeping shared by the three loop families


class _Recorder:
    def __init__(self, cfg: PlannerConfig):
        self.cfg = cfg
        self.best_cost = math.inf
        self.best_path: np.ndarray | None = None
        self.first_iteration: int | None = None
        self.first_time: float | None = None
        self.cost_trace: list = []
        self.time_trace: list = []
        self.rewires = 0
        self.t0 = time.perf_counter()

    def improve(self, i: int, cost: float, path_builder) -> None:
        if cost < self.best_cost - _IMPROVE_TOL:
            self.best_cost = cost
            self.best_path = path_builder()
            if self.first_iteration is None:
                self.first_iteration = i
                self.first_time = time.perf_counter() - self.t0
            self.cost_trace.append((i, cost))

    def tick(self, i: int) -> None:
        if (i + 1) % self.cfg.cost_trace_stride == 0:
            if math.isfinite(self.best_cost):
                self.cost_trace.append((i, self.best_cost))
            self.time_trace.append((i, time.perf_counter() - self.t0))

    def should_stop(self) -> bool:
        if self.cfg.stop_on_first and self.first_iteration is not None:
            return True
        if self.cfg.stop_at_cost is not None and self.best_cost <= self.cfg.stop_at_cost:
            return True
        return False

    def finish(self, env: Environment, cfg: PlannerConfig, iterations: int, resolution: float
               ) -> RunResult:
        wall = time.perf_counter() - self.t0
        if self.best_path is not None:
            _validate_path(env, self.best_path, resolution)
        return RunResult(
            planner=cfg.kind,
            scenario=env.name,
            best_path=self.best_path,
            best_cost=self.best_cost,
            first_solution_iteration=self.first_iteration,
            first_solution_time=self.first_time,
            total_iterations=iterations,
            wall_time=wall,
            rewire_count=self.rewires,
            theta=self.rewires / iterations if iterations else 0.0,
            cost_trace=self.cost_trace,
            time_trace=self.time_trace,
            failed=self.best_path is None,
            config=cfg.echo(),
        )


def _validate_path(env: Environment, path: np.ndarray, resolution: float) -> None:
    for a, b in zip(path[:-1], path[1:]):
        if not env.segment_free_sampled(a, b, resolution):
            raise RuntimeError("internal error: reported path fails collision re-validation")


# ---------------------------------------------------------------------------
# planner loops


def run_planner(env: Environment, cfg: PlannerConfig) -> RunResult:
    """Execute the configured planner loop; deterministic for fixed (env, cfg)."""
    if not isinstance(cfg, PlannerConfig):
        raise ValueError("cfg must be a PlannerConfig")
    res = _resolve(env, cfg)
    if cfg.kind in ("rrt-star", "p-rrt-star"):
        return _run_unidirectional(env, cfg, res)
    if cfg.kind in ("b-rrt-star", "pb-rrt-star"):
        return _run_bidirectional_greedy(env, cfg, res)
    return _run_bidirectional_intelligent(env, cfg, res)


def _near_with_fallback(tree: MotionTree, z: np.ndarray, cfg: PlannerConfig, gamma: float,
                        max_radius: float) -> np.ndarray:
    r = near_radius(tree.size, tree.dimension, gamma, max_radius, cfg.radius_log_base)
    near = tree.neighboring_vertices(z, r)
    if near.shape[0] == 0:
        near = np.array([tree.nearest_vertex(z)], dtype=int)
    return near


def _run_unidirectional(env: Environment, cfg: PlannerConfig, res: _Resolved) -> RunResult:
    rng = np.random.default_rng(cfg.seed)
    tree = MotionTree(env.start)
    guided = cfg.kind in _GUIDED
    rec = _Recorder(cfg)
    goal_vertices: set[int] = set()
    best_goal = -1
    best_goal_cost = math.inf
    iterations = 0
    for i in range(cfg.max_iterations):
        iterations = i + 1
        z = env.sample_free(rng)
        if guided:
            z = rgd(z, env.goal, res.potential, env)
        near = _near_with_fallback(tree, z, cfg, res.gamma, res.max_radius)
        cand = tree.list_sorting(z, near)
        parent = tree.pick_best_parent(env, cand, res.resolution)
        if parent is not None:
            vidx = tree.add(z, parent)
            rec.rewires += tree.rewire(env, vidx, cand.vertices, res.resolution)
            if env.in_goal_region(z):
                goal_vertices.add(vidx)
                if tree.cost[vidx] < best_goal_cost:
                    best_goal, best_goal_cost = vidx, tree.cost[vidx]
            # rewiring only ever lowers costs, so the cached best stays valid
            # unless one of the touched vertices is a goal vertex
            for u in tree.last_cost_changes:
                if u in goal_vertices and tree.cost[u] < best_goal_cost:
                    best_goal, best_goal_cost = u, tree.cost[u]
        if best_goal >= 0:
            rec.improve(i, best_goal_cost, lambda v=best_goal: tree.extract_path(v))
        rec.tick(i)
        if rec.should_stop():
            break
    return rec.finish(env, cfg, iterations, res.resolution)


def _run_bidirectional_greedy(env: Environment, cfg: PlannerConfig, res: _Resolved) -> RunResult:
    rng = np.random.default_rng(cfg.seed)
    trees = (MotionTree(env.start), MotionTree(env.goal))
    active = 0  # trees swap roles every iteration; index 0 stays start-rooted
    guided = cfg.kind in _GUIDED
    rec = _Recorder(cfg)
    iterations = 0
    for i in range(cfg.max_iterations):
        iterations = i + 1
        z = env.sample_free(rng)
        if guided:
            z = bpg(z, i, env.start, env.goal, res.potential, env)
        t_a, t_b = trees[active], trees[1 - active]
        nearest = t_a.nearest_vertex(z)
        z_new = extend(t_a.point(nearest), z, res.eps_steer, env, res.resolution)
        if z_new is not None:
            near = _near_with_fallback(t_a, z_new, cfg, res.gamma, res.max_radius)
            cand = t_a.list_sorting(z_new, near)
            parent = t_a.pick_best_parent(env, cand, res.resolution)
            if parent is not None:
                vidx = t_a.add(z_new, parent)
                rec.rewires += t_a.rewire(env, vidx, cand.vertices, res.resolution)
                z_conn = t_b.nearest_vertex(z_new)
                bridge = connect(
                    env, z_new, z_conn, t_b, res.eps_steer, res.gamma,
                    res.resolution, res.max_radius, cfg.radius_log_base,
                )
                if bridge is not None:
                    cost = t_a.cost[vidx] + bridge.cost_from_root

                    def build(a=active, vi=vidx, br=bridge):
                        p_active = trees[a].extract_path(vi)
                        p_other = trees[1 - a].extract_path(br.parent)
                        if a == 0:
                            return concatenate_solution(p_active, p_other)
                        return concatenate_solution(p_other, p_active)

                    rec.improve(i, cost, build)
        active = 1 - active
        rec.tick(i)
        if rec.should_stop():
            break
    return rec.finish(env, cfg, iterations, res.resolution)


def _run_bidirectional_intelligent(env: Environment, cfg: PlannerConfig, res: _Resolved
                                   ) -> RunResult:
    rng = np.random.default_rng(cfg.seed)
    tree_a = MotionTree(env.start)
    tree_b = MotionTree(env.goal)
    guided = cfg.kind in _GUIDED
    rec = _Recorder(cfg)
    iterations = 0
    for i in range(cfg.max_iterations):
        iterations = i + 1
        z = env.sample_free(rng)
        if guided:
            z = bpg(z, i, env.start, env.goal, res.potential, env)
        r_a = near_radius(tree_a.size, tree_a.dimension, res.gamma, res.max_radius,
                          cfg.radius_log_base)
        r_b = near_radius(tree_b.size, tree_b.dimension, res.gamma, res.max_radius,
                          cfg.radius_log_base)
        near_a = tree_a.neighboring_vertices(z, r_a)
        near_b = tree_b.neighboring_vertices(z, r_b)
        connection = True
        if near_a.shape[0] == 0 and near_b.shape[0] == 0:
            near_a = np.array([tree_a.nearest_vertex(z)], dtype=int)
            near_b = np.array([tree_b.nearest_vertex(z)], dtype=int)
            connection = False
        list_a = tree_a.list_sorting(z, near_a)
        list_b = tree_b.list_sorting(z, near_b)
        best = get_best_tree_parent(env, list_a, list_b, connection, tree_a, tree_b,
                                    res.resolution)
        if best is not None:
            if best.in_first:
                vidx = tree_a.add(z, best.parent)
                rec.rewires += tree_a.rewire(env, vidx, list_a.vertices, res.resolution)
            else:
                vidx = tree_b.add(z, best.parent)
                rec.rewires += tree_b.rewire(env, vidx, list_b.vertices, res.resolution)
            if best.end_to_end_cost is not None:
                pa, pb = best.parent_first, best.parent_second

                def build(zq=z.copy(), pa=pa, pb=pb):
                    return concatenate_solution(
                        tree_a.extract_path(pa), tree_b.extract_path(pb), via=zq
                    )

                rec.improve(i, best.end_to_end_cost, build)
        rec.tick(i)
        if rec.should_stop():
            break
    return rec.finish(env, cfg, iterations, res.resolution)

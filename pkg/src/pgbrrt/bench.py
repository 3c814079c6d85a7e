"""Seeded benchmark campaigns, diagnostics, and result export.

A campaign runs every (scenario, planner) cell ``runs_per_cell`` times with
matched seeds (run j uses seed_base + j for every planner), so per-run
differences across planners are purely algorithmic. A run fails when it
exhausts the iteration cap before reaching the scenario's reference cost
within the configured tolerance.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .environment import Environment
from .planning import PlannerConfig, RunResult, run_planner
from .potential import bpg
from .tree import MotionTree, near_radius

__all__ = [
    "BenchSpec",
    "BenchRow",
    "run_campaign",
    "near_vertex_intensity",
    "cost_time_series",
    "runtime_ratio_series",
    "sweep_n_steps",
    "export_rows_csv",
    "parse_rows_csv",
    "export_results",
]

CSV_HEADER = "scenario,planner,i_min,i_max,i_avg,t_min,t_max,t_avg,theta_avg,cost,fail_pct"


@dataclass
class BenchSpec:
    scenarios: list  # (name, Environment) pairs
    planners: list  # PlannerConfig templates
    runs_per_cell: int = 50
    seed_base: int = 0
    failure_cap: int = 5_000_000
    optimal_tolerance: float = 0.05
    reference_costs: dict = field(default_factory=dict)  # overrides per scenario name

    def __post_init__(self):
        if self.runs_per_cell < 1:
            raise ValueError("runs_per_cell must be >= 1")
        if self.failure_cap < 1:
            raise ValueError("failure_cap must be >= 1")

    def reference_cost(self, name: str, env: Environment) -> float:
        if name in self.reference_costs:
            return float(self.reference_costs[name])
        if env.reference_cost is None:
            raise ValueError(
                f"scenario {name!r} carries no reference_cost and none was supplied"
            )
        return float(env.reference_cost)


@dataclass
class BenchRow:
    scenario: str
    planner: str
    i_min: int | None
    i_max: int | None
    i_avg: float | None
    t_min: float | None
    t_max: float | None
    t_avg: float | None
    theta_avg: float | None
    reference_cost: float
    fail_percent: float

    def to_csv_fields(self) -> list[str]:
        def num(x):
            return "" if x is None else repr(x) if isinstance(x, float) else str(x)

        return [
            self.scenario,
            self.planner,
            num(self.i_min),
            num(self.i_max),
            num(self.i_avg),
            num(self.t_min),
            num(self.t_max),
            num(self.t_avg),
            num(self.theta_avg),
            num(self.reference_cost),
            num(self.fail_percent),
        ]

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "planner": self.planner,
            "i_min": self.i_min,
            "i_max": self.i_max,
            "i_avg": self.i_avg,
            "t_min": self.t_min,
            "t_max": self.t_max,
            "t_avg": self.t_avg,
            "theta_avg": self.theta_avg,
            "cost": self.reference_cost,
            "fail_pct": self.fail_percent,
        }


def _run_one(task):
    env, cfg = task
    return run_planner(env, cfg)


def run_campaign(spec: BenchSpec, jobs: int = 1, collect_results: bool = False):
    """Execute every campaign cell; returns rows (and raw results on request).

    Cells are independent, so with jobs > 1 the runs go through a process
    pool; aggregation order is fixed regardless of completion order.
    """
    tasks = []
    keys = []
    for name, env in spec.scenarios:
        ref = spec.reference_cost(name, env)
        threshold = ref * (1.0 + spec.optimal_tolerance)
        for template in spec.planners:
            for j in range(spec.runs_per_cell):
                cfg = replace(
                    template,
                    seed=spec.seed_base + j,
                    max_iterations=spec.failure_cap,
                    stop_at_cost=threshold,
                )
                tasks.append((env, cfg))
                keys.append((name, template.kind, j, threshold))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_one, tasks, chunksize=1))
    else:
        outcomes = [_run_one(t) for t in tasks]

    rows = []
    grouped: dict = {}
    results_by_cell: dict = {}
    for (name, kind, j, threshold), result in zip(keys, outcomes):
        grouped.setdefault((name, kind), []).append((result, threshold))
        results_by_cell.setdefault((name, kind), []).append(result)
    for name, env in spec.scenarios:
        ref = spec.reference_cost(name, env)
        for template in spec.planners:
            cell = grouped[(name, template.kind)]
            ok = [r for r, thr in cell if r.best_cost <= thr]
            fails = len(cell) - len(ok)
            if ok:
                iters = [r.total_iterations for r in ok]
                times = [r.wall_time for r in ok]
                thetas = [r.theta for r in ok]
                row = BenchRow(
                    scenario=name,
                    planner=template.kind,
                    i_min=min(iters),
                    i_max=max(iters),
                    i_avg=float(np.mean(iters)),
                    t_min=min(times),
                    t_max=max(times),
                    t_avg=float(np.mean(times)),
                    theta_avg=float(np.mean(thetas)),
                    reference_cost=ref,
                    fail_percent=100.0 * fails / len(cell),
                )
            else:
                row = BenchRow(name, template.kind, None, None, None, None, None, None,
                               None, ref, 100.0)
            rows.append(row)
    if collect_results:
        return rows, results_by_cell
    return rows


# ---------------------------------------------------------------------------
# diagnostics


def _ball_volume(d: int, r: float) -> float:
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0) * r**d


def near_vertex_intensity(tree: MotionTree, z, gamma: float, max_radius: float) -> float:
    """Vertices in the shrinking connection ball, per unit ball volume."""
    d = tree.dimension
    r = near_radius(tree.size, d, gamma, max_radius)
    count = int(tree.neighboring_vertices(np.asarray(z, dtype=float), r).shape[0])
    return count / _ball_volume(d, r)


def _cost_at_times(result: RunResult, grid: np.ndarray) -> np.ndarray:
    """Best cost as a right-continuous step function of wall time."""
    if not result.cost_trace:
        return np.full(grid.shape, math.inf)
    iters = np.array([i for i, _ in result.cost_trace], dtype=float)
    costs = np.array([c for _, c in result.cost_trace], dtype=float)
    if result.time_trace:
        t_iters = np.array([i for i, _ in result.time_trace], dtype=float)
        t_vals = np.array([t for _, t in result.time_trace], dtype=float)
        times = np.interp(iters, t_iters, t_vals,
                          left=t_vals[0] * (iters[0] + 1) / (t_iters[0] + 1) if len(t_vals) else 0.0,
                          right=t_vals[-1] if len(t_vals) else result.wall_time)
    else:
        times = iters / max(result.total_iterations, 1) * result.wall_time
    # running minimum keeps the step function non-increasing
    costs = np.minimum.accumulate(costs)
    idx = np.searchsorted(times, grid, side="right") - 1
    out = np.full(grid.shape, math.inf)
    mask = idx >= 0
    out[mask] = costs[idx[mask]]
    return out


def cost_time_series(results: list[RunResult], points: int = 100) -> dict:
    """Median best-cost versus wall-time per planner, on a shared time grid."""
    if not results:
        raise ValueError("no results supplied")
    t_max = max(r.wall_time for r in results)
    grid = np.linspace(0.0, t_max, points)
    by_planner: dict = {}
    for r in results:
        by_planner.setdefault(r.planner, []).append(r)
    curves = {
        planner: np.median(np.stack([_cost_at_times(r, grid) for r in runs]), axis=0)
        for planner, runs in by_planner.items()
    }
    return {"time": grid, "median_cost": curves}


def _time_at_iterations(result: RunResult, grid: np.ndarray) -> np.ndarray:
    if not result.time_trace:
        raise ValueError("result carries no time_trace; rerun with a cost_trace_stride")
    iters = np.array([i for i, _ in result.time_trace], dtype=float)
    times = np.array([t for _, t in result.time_trace], dtype=float)
    return np.interp(grid, iters, times)


def runtime_ratio_series(results_a: list[RunResult], results_b: list[RunResult],
                         points: int = 50) -> dict:
    """Cumulative-runtime ratio a/b versus iteration count, matched by seed.

    Both result lists must come from runs over the same iteration budget.
    """
    if len(results_a) != len(results_b) or not results_a:
        raise ValueError("need equally sized, non-empty result lists")
    top = min(min(r.total_iterations for r in results_a),
              min(r.total_iterations for r in results_b))
    lo = max(results_a[0].time_trace[0][0], results_b[0].time_trace[0][0])
    grid = np.linspace(lo, top - 1, points)
    ratios = np.stack([
        _time_at_iterations(ra, grid) / _time_at_iterations(rb, grid)
        for ra, rb in zip(results_a, results_b)
    ])
    return {"iterations": grid, "ratio": ratios.mean(axis=0), "per_run": ratios}


def guided_displacement(env: Environment, n_steps: int, samples: int = 300,
                        seed: int = 0, potential=None) -> float:
    """Mean displacement of a fixed seeded sample batch under pole guidance."""
    from .planning import _resolve

    cfg = PlannerConfig(kind="pib-rrt-star", potential=potential)
    pot = _resolve(env, cfg).potential
    pot = replace(pot, n_steps=n_steps)
    rng = np.random.default_rng(seed)
    total = 0.0
    for i in range(samples):
        z = env.sample_free(rng)
        z_pb = bpg(z, i, env.start, env.goal, pot, env)
        total += float(np.linalg.norm(z_pb - z))
    return total / samples


def sweep_n_steps(env: Environment, kind: str, values, seeds,
                  template: PlannerConfig | None = None) -> list[dict]:
    """Descent-budget sweep: first-solution iterations and guided displacement."""
    if kind not in ("p-rrt-star", "pb-rrt-star", "pib-rrt-star"):
        raise ValueError(f"planner kind {kind!r} does not use potential guidance")
    template = template or PlannerConfig(kind=kind)
    from .planning import _resolve

    rows = []
    for n in values:
        firsts = []
        for seed in seeds:
            pot = replace(_resolve(env, template).potential, n_steps=int(n))
            cfg = replace(template, kind=kind, seed=int(seed), stop_on_first=True,
                          potential=pot)
            result = run_planner(env, cfg)
            firsts.append(
                result.first_solution_iteration
                if result.first_solution_iteration is not None
                else cfg.max_iterations
            )
        rows.append({
            "n_steps": int(n),
            "median_first_solution_iterations": float(np.median(firsts)),
            "mean_guided_displacement": guided_displacement(env, int(n)),
        })
    return rows


# ---------------------------------------------------------------------------
# export


def export_rows_csv(rows: list[BenchRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for row in rows:
        writer.writerow(row.to_csv_fields())
    return buf.getvalue()


def parse_rows_csv(text: str) -> list[BenchRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != CSV_HEADER.split(","):
        raise ValueError(f"unexpected CSV header: {header}")
    rows = []
    for rec in reader:
        (scenario, planner, i_min, i_max, i_avg, t_min, t_max, t_avg, theta_avg,
         cost, fail_pct) = rec
        rows.append(BenchRow(
            scenario=scenario,
            planner=planner,
            i_min=int(i_min) if i_min else None,
            i_max=int(i_max) if i_max else None,
            i_avg=float(i_avg) if i_avg else None,
            t_min=float(t_min) if t_min else None,
            t_max=float(t_max) if t_max else None,
            t_avg=float(t_avg) if t_avg else None,
            theta_avg=float(theta_avg) if theta_avg else None,
            reference_cost=float(cost),
            fail_percent=float(fail_pct),
        ))
    return rows


def export_results(rows: list[BenchRow], results: dict | None, fmt: str) -> str:
    """Render campaign output as CSV (rows only) or JSON (rows + raw runs)."""
    if fmt == "csv":
        return export_rows_csv(rows)
    if fmt == "json":
        doc = {"rows": [r.to_dict() for r in rows]}
        if results:
            doc["results"] = {
                f"{name}/{planner}": [r.to_dict() for r in runs]
                for (name, planner), runs in results.items()
            }
        return json.dumps(doc, indent=2) + "\n"
    raise ValueError(f"unknown export format {fmt!r}; use 'csv' or 'json'")

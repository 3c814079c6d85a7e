"""Command-line front end: plan, bench, sweep, render.

Exit codes: 0 success, 1 planner found no path, 2 usage or validation error.
Output files are written atomically (temp file + rename), so an error never
leaves a partial file behind.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

from .bench import (
    BenchSpec,
    export_results,
    run_campaign,
    sweep_n_steps,
)
from .defaults import get_defaults
from .environment import (
    Environment,
    ScenarioError,
    builtin_scenario,
    builtin_scenario_names,
    load_scenario_file,
)
from .planning import PLANNER_KINDS, PlannerConfig, run_planner
from .potential import PotentialParams
from .render import render_svg


class CliError(Exception):
    """Validation failure reported as a one-line diagnostic, exit code 2."""


def _atomic_write(path: str, text: str) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_env(ref: str, goal_radius: float | None = None) -> Environment:
    try:
        if os.path.exists(ref):
            env = load_scenario_file(ref)
        elif ref in builtin_scenario_names():
            env = builtin_scenario(ref)
        else:
            raise CliError(
                f"scenario {ref!r} is neither a file nor a builtin "
                f"(builtins: {', '.join(builtin_scenario_names())})"
            )
    except ScenarioError as exc:
        raise CliError(f"invalid scenario {ref!r}: {exc}") from exc
    if goal_radius is not None:
        env = Environment(
            bounds_min=env.bounds_min,
            bounds_max=env.bounds_max,
            obstacles=env.obstacles,
            start=env.start,
            goal=env.goal,
            goal_radius=goal_radius,
            name=env.name,
            reference_cost=env.reference_cost,
        )
    return env


def _gamma_value(raw: str):
    if raw == "auto":
        return raw
    try:
        return float(raw)
    except ValueError as exc:
        raise CliError(f"--gamma must be a number or 'auto', got {raw!r}") from exc


def _potential_from_args(args, env: Environment) -> PotentialParams | None:
    table = get_defaults()
    if args.kp is None and args.eps_pot is None and args.n_steps is None and args.d_obs is None:
        return None
    return PotentialParams(
        k_p=args.kp if args.kp is not None else table["k_p"],
        eps_pot=args.eps_pot if args.eps_pot is not None else table["eps_pot_frac"] * env.diagonal,
        n_steps=args.n_steps if args.n_steps is not None else int(table["n_steps"]),
        d_obs_star=args.d_obs if args.d_obs is not None else table["d_obs_frac"] * env.diagonal,
    )


def _add_planner_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--planner", default="pib-rrt-star", choices=PLANNER_KINDS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--gamma", default="auto")
    p.add_argument("--eps-steer", type=float, default=None)
    p.add_argument("--kp", type=float, default=None)
    p.add_argument("--eps-pot", type=float, default=None)
    p.add_argument("--n-steps", type=int, default=None)
    p.add_argument("--d-obs", type=float, default=None)
    p.add_argument("--goal-radius", type=float, default=None)
    p.add_argument("--stop-on-first", action="store_true")


def _config_from_args(args, env: Environment) -> PlannerConfig:
    table = get_defaults()
    try:
        return PlannerConfig(
            kind=args.planner,
            gamma=_gamma_value(str(args.gamma)),
            eps_steer=args.eps_steer if args.eps_steer is not None else "auto",
            max_iterations=args.max_iters if args.max_iters is not None else int(table["max_iterations"]),
            seed=args.seed,
            potential=_potential_from_args(args, env),
            stop_on_first=args.stop_on_first,
            cost_trace_stride=int(table["cost_trace_stride"]),
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _cmd_plan(args) -> int:
    env = _load_env(args.scenario, args.goal_radius)
    cfg = _config_from_args(args, env)
    result = run_planner(env, cfg)
    if args.out:
        _atomic_write(args.out, json.dumps(result.to_dict(), indent=2) + "\n")
    if args.svg:
        _atomic_write(args.svg, render_svg(env, best_path=result.best_path))
    if not args.out and not args.svg:
        print(json.dumps(result.to_dict(), indent=2))
    return 1 if result.failed else 0


def _cmd_bench(args) -> int:
    table = get_defaults()
    try:
        with open(args.spec, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError as exc:
        raise CliError(f"spec file not found: {args.spec}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"spec file is not valid JSON: {exc}") from exc
    scenarios = []
    for ref in doc.get("scenarios", []):
        env = _load_env(str(ref))
        scenarios.append((env.name or str(ref), env))
    if not scenarios:
        raise CliError("spec lists no scenarios")
    planners = []
    for entry in doc.get("planners", []):
        if isinstance(entry, str):
            entry = {"kind": entry}
        try:
            planners.append(PlannerConfig(**entry))
        except (TypeError, ValueError) as exc:
            raise CliError(f"invalid planner entry {entry}: {exc}") from exc
    if not planners:
        raise CliError("spec lists no planners")
    spec = BenchSpec(
        scenarios=scenarios,
        planners=planners,
        runs_per_cell=int(doc.get("runs_per_cell", table["runs_per_cell"])),
        seed_base=int(doc.get("seed_base", 0)),
        failure_cap=int(doc.get("failure_cap", table["failure_cap"])),
        optimal_tolerance=float(doc.get("optimal_tolerance", table["optimal_tolerance"])),
        reference_costs=doc.get("reference_costs", {}),
    )
    rows, results = run_campaign(spec, jobs=args.jobs, collect_results=True)
    text = export_results(rows, results if args.format == "json" else None, args.format)
    if args.out:
        _atomic_write(args.out, text)
    else:
        print(text, end="")
    return 0


def _cmd_sweep(args) -> int:
    env = _load_env(args.scenario)
    values = [int(v) for v in args.values.split(",") if v != ""]
    seeds = list(range(args.seed, args.seed + args.runs))
    template = PlannerConfig(
        kind=args.planner,
        gamma=_gamma_value(str(args.gamma)),
        max_iterations=args.max_iters or int(get_defaults()["max_iterations"]),
    )
    try:
        rows = sweep_n_steps(env, args.planner, values, seeds, template)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    text = json.dumps(rows, indent=2) + "\n"
    if args.out:
        _atomic_write(args.out, text)
    else:
        print(text, end="")
    return 0


def _cmd_render(args) -> int:
    env = _load_env(args.scenario)
    best_path = None
    if args.run:
        try:
            with open(args.run, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read run file {args.run}: {exc}") from exc
        if doc.get("best_path"):
            import numpy as np

            best_path = np.asarray(doc["best_path"], dtype=float)
    try:
        svg = render_svg(env, best_path=best_path)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    _atomic_write(args.svg, svg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pgbrrt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_plan = sub.add_parser("plan", help="run one seeded planner")
    p_plan.add_argument("--scenario", required=True)
    _add_planner_flags(p_plan)
    p_plan.add_argument("--out")
    p_plan.add_argument("--svg")
    p_plan.set_defaults(func=_cmd_plan)

    p_bench = sub.add_parser("bench", help="run a benchmark campaign from a spec file")
    p_bench.add_argument("--spec", required=True)
    p_bench.add_argument("--format", default="csv", choices=("csv", "json"))
    p_bench.add_argument("--jobs", type=int, default=1)
    p_bench.add_argument("--out")
    p_bench.set_defaults(func=_cmd_bench)

    p_sweep = sub.add_parser("sweep", help="sweep the descent step budget")
    p_sweep.add_argument("--scenario", required=True)
    p_sweep.add_argument("--planner", default="pib-rrt-star", choices=PLANNER_KINDS)
    p_sweep.add_argument("--values", default="0,5,10,50")
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--runs", type=int, default=5)
    p_sweep.add_argument("--gamma", default="auto")
    p_sweep.add_argument("--max-iters", type=int, default=None)
    p_sweep.add_argument("--out")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_render = sub.add_parser("render", help="render a scenario and optional stored run")
    p_render.add_argument("--scenario", required=True)
    p_render.add_argument("--run")
    p_render.add_argument("--svg", required=True)
    p_render.set_defaults(func=_cmd_render)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already; normalize other codes
        return 2 if exc.code not in (0,) else 0
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

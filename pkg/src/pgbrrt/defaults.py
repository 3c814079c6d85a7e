"""Single source of numeric defaults, overridable via PGBRRT_DEFAULTS.

Fractions marked ``*_frac`` are scaled by the scenario's bounding-box diagonal
when a config leaves the corresponding value on "auto", so one defaults table
works across scenarios of very different physical size.
"""

from __future__ import annotations

import json
import os

DEFAULTS: dict = {
    # planner loop
    "max_iterations": 200_000,
    "eps_steer_frac": 0.05,        # max extension length, fraction of bounds diagonal
    "gamma_scale": 2.0,            # gamma = gamma_scale * mu_hat(free)^(1/d)
    "gamma_measure_samples": 20_000,
    "collision_resolution_frac": 0.005,
    "cost_trace_stride": 100,
    # potential guidance
    "k_p": 1.0,
    "n_steps": 10,
    "eps_pot_frac": 0.02,
    "d_obs_frac": 0.01,
    # scenario / campaign
    "goal_radius": 0.5,
    "runs_per_cell": 50,
    "failure_cap": 5_000_000,
    "optimal_tolerance": 0.05,
}

_ENV_VAR = "PGBRRT_DEFAULTS"


def get_defaults() -> dict:
    """Defaults table, with overrides from the PGBRRT_DEFAULTS file if set."""
    table = dict(DEFAULTS)
    path = os.environ.get(_ENV_VAR)
    if path:
        with open(path, "r", encoding="utf-8") as fh:
            overrides = json.load(fh)
        unknown = set(overrides) - set(table)
        if unknown:
            raise ValueError(f"unknown defaults keys in {path}: {sorted(unknown)}")
        table.update(overrides)
    return table

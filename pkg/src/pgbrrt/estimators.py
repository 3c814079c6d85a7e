"""Scikit-learn style wrappers around the planner loops.

Each planner is an estimator whose hyper-parameters live in ``__init__`` (so
``get_params`` / ``set_params`` / ``clone`` work), and whose ``fit`` runs the
planning loop on an Environment, storing the outcome in trailing-underscore
attributes.
"""

from __future__ import annotations

import math

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .environment import Environment
from .planning import PlannerConfig, run_planner
from .potential import PotentialParams

__all__ = [
    "BasePlanner",
    "RRTStar",
    "PRRTStar",
    "BRRTStar",
    "IBRRTStar",
    "PBRRTStar",
    "PIBRRTStar",
]


class BasePlanner(BaseEstimator):
    """Shared estimator surface; subclasses fix the planner kind."""

    _kind = ""

    def __init__(
        self,
        gamma="auto",
        eps_steer="auto",
        collision_resolution="auto",
        max_iterations=200_000,
        seed=0,
        k_p=None,
        eps_pot=None,
        n_steps=None,
        d_obs_star=None,
        stop_on_first=False,
        stop_at_cost=None,
        cost_trace_stride=100,
    ):
        self.gamma = gamma
        self.eps_steer = eps_steer
        self.collision_resolution = collision_resolution
        self.max_iterations = max_iterations
        self.seed = seed
        self.k_p = k_p
        self.eps_pot = eps_pot
        self.n_steps = n_steps
        self.d_obs_star = d_obs_star
        self.stop_on_first = stop_on_first
        self.stop_at_cost = stop_at_cost
        self.cost_trace_stride = cost_trace_stride

    def _config(self) -> PlannerConfig:
        potential = None
        overrides = {
            "k_p": self.k_p,
            "eps_pot": self.eps_pot,
            "n_steps": self.n_steps,
            "d_obs_star": self.d_obs_star,
        }
        if any(v is not None for v in overrides.values()):
            defaults = PotentialParams()
            potential = PotentialParams(
                **{k: (v if v is not None else getattr(defaults, k)) for k, v in overrides.items()}
            )
        return PlannerConfig(
            kind=self._kind,
            gamma=self.gamma,
            eps_steer=self.eps_steer,
            collision_resolution=self.collision_resolution,
            max_iterations=self.max_iterations,
            seed=self.seed,
            potential=potential,
            stop_on_first=self.stop_on_first,
            stop_at_cost=self.stop_at_cost,
            cost_trace_stride=self.cost_trace_stride,
        )

    def fit(self, environment: Environment, y=None):
        """Run the planning loop; the environment plays the role of the data."""
        if not isinstance(environment, Environment):
            raise ValueError("fit expects an Environment instance")
        self.result_ = run_planner(environment, self._config())
        self.path_ = self.result_.best_path
        self.cost_ = self.result_.best_cost
        return self

    def predict(self, environment: Environment | None = None):
        """Best path found by ``fit`` (list of waypoints), or None on failure.

        Passing an environment re-plans on it first, so the estimator can sit
        at the end of a pipeline.
        """
        if environment is not None:
            self.fit(environment)
        if not hasattr(self, "result_"):
            raise NotFittedError("call fit(environment) before predict()")
        return self.path_

    def score(self, environment: Environment | None = None, y=None) -> float:
        """Negative best path cost (higher is better, sklearn convention)."""
        if environment is not None and not hasattr(self, "result_"):
            self.fit(environment)
        if not hasattr(self, "result_"):
            raise NotFittedError("call fit(environment) before score()")
        return -self.cost_ if math.isfinite(self.cost_) else -math.inf


class RRTStar(BasePlanner):
    """Asymptotically optimal single-tree baseline."""

    _kind = "rrt-star"


class PRRTStar(BasePlanner):
    """Single tree with samples descended toward the goal."""

    _kind = "p-rrt-star"


class BRRTStar(BasePlanner):
    """Two trees with a greedy connect probe, swapping roles every iteration."""

    _kind = "b-rrt-star"


class IBRRTStar(BasePlanner):
    """Two trees; each sample joins whichever tree offers the cheaper parent."""

    _kind = "ib-rrt-star"


class PBRRTStar(BasePlanner):
    """BRRTStar with alternating-pole potential guidance of the samples."""

    _kind = "pb-rrt-star"


class PIBRRTStar(BasePlanner):
    """IBRRTStar with alternating-pole potential guidance of the samples."""

    _kind = "pib-rrt-star"

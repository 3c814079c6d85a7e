"""Potentially guided bidirectional RRT* planners and benchmark harness."""

__version__ = "0.1.0"

from .environment import (  # noqa: E402
    Box,
    Environment,
    ScenarioError,
    Sphere,
    builtin_scenario,
    builtin_scenario_names,
    load_scenario,
    load_scenario_file,
    serialize_scenario,
)
from .potential import PotentialParams, attractive_force, bpg, descend, rgd  # noqa: E402
from .tree import CandidateList, MotionTree, near_radius  # noqa: E402
from .planning import (  # noqa: E402
    PLANNER_KINDS,
    PlannerConfig,
    RunResult,
    concatenate_solution,
    connect,
    extend,
    get_best_tree_parent,
    run_planner,
    steer,
)
from .estimators import (  # noqa: E402
    BRRTStar,
    BasePlanner,
    IBRRTStar,
    PBRRTStar,
    PIBRRTStar,
    PRRTStar,
    RRTStar,
)

__all__ = [
    "__version__",
    "Box",
    "Sphere",
    "Environment",
    "ScenarioError",
    "load_scenario",
    "load_scenario_file",
    "serialize_scenario",
    "builtin_scenario",
    "builtin_scenario_names",
    "PotentialParams",
    "attractive_force",
    "descend",
    "rgd",
    "bpg",
    "MotionTree",
    "CandidateList",
    "near_radius",
    "PLANNER_KINDS",
    "PlannerConfig",
    "RunResult",
    "run_planner",
    "steer",
    "extend",
    "connect",
    "get_best_tree_parent",
    "concatenate_solution",
    "BasePlanner",
    "RRTStar",
    "PRRTStar",
    "BRRTStar",
    "IBRRTStar",
    "PBRRTStar",
    "PIBRRTStar",
]

"""Configuration space: bounds, obstacles, collision queries, scenario I/O.

Obstacles are closed sets; free space is open relative to them. A point on an
obstacle boundary is occupied, which keeps ``is_free(z)`` equivalent to
``nearest_obstacle_distance(z) > 0 and z inside bounds``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Box",
    "Sphere",
    "Environment",
    "ScenarioError",
    "load_scenario",
    "load_scenario_file",
    "serialize_scenario",
    "builtin_scenario",
    "builtin_scenario_names",
]

REJECTION_CAP = 10**6


class ScenarioError(ValueError):
    """Malformed or invariant-violating scenario document."""


@dataclass(frozen=True)
class Box:
    """Axis-aligned box obstacle (closed point set)."""

    min_corner: np.ndarray
    max_corner: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "min_corner", np.asarray(self.min_corner, dtype=float))
        object.__setattr__(self, "max_corner", np.asarray(self.max_corner, dtype=float))
        if self.min_corner.shape != self.max_corner.shape:
            raise ScenarioError("box corners must have the same dimension")
        if np.any(self.min_corner > self.max_corner):
            raise ScenarioError("box min corner must be componentwise <= max corner")

    @property
    def dimension(self) -> int:
        return self.min_corner.shape[0]

    def to_dict(self) -> dict:
        return {
            "type": "box",
            "min": self.min_corner.tolist(),
            "max": self.max_corner.tolist(),
        }


@dataclass(frozen=True)
class Sphere:
    """Sphere obstacle (closed ball)."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius <= 0:
            raise ScenarioError("sphere radius must be > 0")

    @property
    def dimension(self) -> int:
        return self.center.shape[0]

    def to_dict(self) -> dict:
        return {"type": "sphere", "center": self.center.tolist(), "radius": self.radius}


@dataclass
class Environment:
    """Immutable planning world: bounds, obstacles, start and goal region.

    All arrays are packed once in ``__post_init__`` so the per-query code is
    vectorized numpy; the instance is treated as read-only afterwards.
    """

    bounds_min: np.ndarray
    bounds_max: np.ndarray
    obstacles: tuple
    start: np.ndarray
    goal: np.ndarray
    goal_radius: float = 0.5
    name: str = ""
    reference_cost: float | None = None

    # packed obstacle arrays, filled in __post_init__
    _box_min: np.ndarray = field(init=False, repr=False)
    _box_max: np.ndarray = field(init=False, repr=False)
    _sph_c: np.ndarray = field(init=False, repr=False)
    _sph_r: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.bounds_min = np.asarray(self.bounds_min, dtype=float)
        self.bounds_max = np.asarray(self.bounds_max, dtype=float)
        self.start = np.asarray(self.start, dtype=float)
        self.goal = np.asarray(self.goal, dtype=float)
        self.obstacles = tuple(self.obstacles)
        d = self.bounds_min.shape[0]
        if d < 2:
            raise ScenarioError("environment dimension must be >= 2")
        if self.bounds_max.shape[0] != d:
            raise ScenarioError("bounds min/max dimension mismatch")
        if np.any(self.bounds_min >= self.bounds_max):
            raise ScenarioError("bounds must have positive extent on every axis")
        for p, label in ((self.start, "start"), (self.goal, "goal")):
            if p.shape[0] != d:
                raise ScenarioError(f"{label} has dimension {p.shape[0]}, expected {d}")
            if not np.all(np.isfinite(p)):
                raise ScenarioError(f"{label} coordinates must be finite")
        if self.goal_radius <= 0:
            raise ScenarioError("goal_radius must be > 0")
        for obs in self.obstacles:
            if obs.dimension != d:
                raise ScenarioError(
                    f"obstacle dimension {obs.dimension} does not match environment dimension {d}"
                )

        boxes = [o for o in self.obstacles if isinstance(o, Box)]
        spheres = [o for o in self.obstacles if isinstance(o, Sphere)]
        self._box_min = (
            np.stack([b.min_corner for b in boxes]) if boxes else np.empty((0, d))
        )
        self._box_max = (
            np.stack([b.max_corner for b in boxes]) if boxes else np.empty((0, d))
        )
        self._sph_c = np.stack([s.center for s in spheres]) if spheres else np.empty((0, d))
        self._sph_r = np.array([s.radius for s in spheres]) if spheres else np.empty(0)
        self._sph_r2 = self._sph_r * self._sph_r
        self._has_boxes = bool(boxes)
        self._has_spheres = bool(spheres)

        if not self.is_free(self.start):
            raise ScenarioError("start must lie in free space")
        if not self.is_free(self.goal):
            raise ScenarioError("goal must lie in free space")

    @property
    def dimension(self) -> int:
        return self.bounds_min.shape[0]

    @property
    def diagonal(self) -> float:
        return float(np.linalg.norm(self.bounds_max - self.bounds_min))

    def bounds_volume(self) -> float:
        return float(np.prod(self.bounds_max - self.bounds_min))

    def _check_dim(self, z: np.ndarray) -> np.ndarray:
        if type(z) is not np.ndarray or z.dtype != np.float64:
            z = np.asarray(z, dtype=float)
        if z.shape[-1] != self.dimension:
            raise ValueError(
                f"point has dimension {z.shape[-1]}, environment expects {self.dimension}"
            )
        return z

    def is_free(self, z) -> bool:
        """True iff ``z`` is inside bounds and strictly outside every obstacle."""
        z = self._check_dim(z)
        if (z < self.bounds_min).any() or (z > self.bounds_max).any():
            return False
        if self._has_boxes:
            if ((self._box_min <= z) & (z <= self._box_max)).all(axis=1).any():
                return False
        if self._has_spheres:
            w = self._sph_c - z
            if ((w * w).sum(axis=1) <= self._sph_r2).any():
                return False
        return True

    def free_mask(self, pts: np.ndarray) -> np.ndarray:
        """Vectorized ``is_free`` over an (m, d) array of points."""
        pts = self._check_dim(pts)
        ok = np.all((pts >= self.bounds_min) & (pts <= self.bounds_max), axis=1)
        if self._box_min.shape[0]:
            inside = np.all(
                (self._box_min[None, :, :] <= pts[:, None, :])
                & (pts[:, None, :] <= self._box_max[None, :, :]),
                axis=2,
            ).any(axis=1)
            ok &= ~inside
        if self._sph_c.shape[0]:
            w = pts[:, None, :] - self._sph_c[None, :, :]
            ok &= ~((w * w).sum(axis=2) <= self._sph_r2[None, :]).any(axis=1)
        return ok

    def nearest_obstacle_distance(self, z) -> float:
        """Euclidean distance from ``z`` to the nearest obstacle point set.

        Returns 0 inside an obstacle and +inf when there are no obstacles.
        """
        z = self._check_dim(z)
        best = math.inf
        if self._has_boxes:
            delta = np.maximum(
                np.maximum(self._box_min - z, 0.0), np.maximum(z - self._box_max, 0.0)
            )
            best = math.sqrt(float((delta * delta).sum(axis=1).min()))
        if self._has_spheres:
            w = self._sph_c - z
            dist = np.sqrt((w * w).sum(axis=1)) - self._sph_r
            best = min(best, max(0.0, float(dist.min())))
        return max(best, 0.0)

    def sample_free(self, rng: np.random.Generator, cap: int = REJECTION_CAP) -> np.ndarray:
        """Uniform sample of free space by rejection over the bounding box.

        Candidates are drawn in small blocks and filtered in one vectorized
        pass; the first free candidate (in draw order) is returned, so the
        result is still uniform on free space and seed-deterministic.
        """
        block = 16
        drawn = 0
        while drawn < cap:
            pts = rng.uniform(self.bounds_min, self.bounds_max, size=(block, self.dimension))
            drawn += block
            free = self.free_mask(pts)
            idx = int(np.argmax(free))
            if free[idx]:
                return pts[idx]
        raise RuntimeError(
            f"failed to sample free space after {cap} rejections; environment is degenerate"
        )

    def segment_free(self, a, b, resolution: float = 0.05) -> bool:
        """True iff the closed segment a-b stays in free space.

        Uses exact segment/box and segment/sphere tests, so the answer does not
        depend on ``resolution`` for the supported shapes; ``resolution`` is kept
        for callers that re-validate paths by dense sampling.
        """
        if resolution <= 0:
            raise ValueError("resolution must be > 0")
        a = self._check_dim(a)
        b = self._check_dim(b)
        # bounds are convex, so endpoint containment covers the whole segment
        if ((a < self.bounds_min).any() or (a > self.bounds_max).any()
                or (b < self.bounds_min).any() or (b > self.bounds_max).any()):
            return False
        v = b - a
        if self._has_boxes and _segment_hits_any_box(
            a, v, self._box_min, self._box_max
        ):
            return False
        if self._has_spheres and _segment_hits_any_sphere(
            a, v, self._sph_c, self._sph_r2
        ):
            return False
        return True

    def segment_free_sampled(self, a, b, resolution: float) -> bool:
        """Resolution-based re-validation: point checks at spacing <= resolution."""
        a = self._check_dim(a)
        b = self._check_dim(b)
        length = float(np.linalg.norm(b - a))
        steps = max(1, int(math.ceil(length / resolution)))
        ts = np.linspace(0.0, 1.0, steps + 1)
        pts = a[None, :] + ts[:, None] * (b - a)[None, :]
        return bool(self.free_mask(pts).all())

    def in_goal_region(self, z) -> bool:
        w = self._check_dim(z) - self.goal
        return float(w @ w) <= self.goal_radius * self.goal_radius

    def free_measure_estimate(self, samples: int, rng: np.random.Generator) -> float:
        """Monte-Carlo estimate of the free-space volume."""
        if samples < 1:
            raise ValueError("samples must be >= 1")
        pts = rng.uniform(self.bounds_min, self.bounds_max, size=(samples, self.dimension))
        frac = float(np.count_nonzero(self.free_mask(pts))) / samples
        return frac * self.bounds_volume()

    def to_dict(self) -> dict:
        doc = {
            "name": self.name,
            "dimension": self.dimension,
            "bounds": {"min": self.bounds_min.tolist(), "max": self.bounds_max.tolist()},
            "obstacles": [o.to_dict() for o in self.obstacles],
            "start": self.start.tolist(),
            "goal": self.goal.tolist(),
            "goal_radius": self.goal_radius,
        }
        if self.reference_cost is not None:
            doc["reference_cost"] = self.reference_cost
        return doc


def _segment_hits_any_box(a, v, box_min, box_max) -> bool:
    """Exact slab test of segment a + t v, t in [0, 1], against closed boxes."""
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(v != 0.0, 1.0 / v, np.inf)
        t1 = (box_min - a) * inv
        t2 = (box_max - a) * inv
    lo = np.minimum(t1, t2)
    hi = np.maximum(t1, t2)
    # axes where the segment is parallel to the slab: hit only if a is inside it
    parallel = v == 0.0
    inside_slab = (box_min <= a) & (a <= box_max)
    lo = np.where(parallel[None, :], np.where(inside_slab, -np.inf, np.inf), lo)
    hi = np.where(parallel[None, :], np.where(inside_slab, np.inf, -np.inf), hi)
    t_enter = np.max(np.maximum(lo, 0.0), axis=1)
    t_exit = np.min(np.minimum(hi, 1.0), axis=1)
    return bool(np.any(t_enter <= t_exit))


def _segment_hits_any_sphere(a, v, centers, radii_sq) -> bool:
    """Closest-approach test of the segment against closed balls."""
    w = centers - a
    vv = float(v @ v)
    if vv == 0.0:
        return bool(((w * w).sum(axis=1) <= radii_sq).any())
    t = np.clip((w @ v) / vv, 0.0, 1.0)
    gap = w - t[:, None] * v[None, :]
    return bool(((gap * gap).sum(axis=1) <= radii_sq).any())


def _parse_point(raw, d: int, label: str) -> np.ndarray:
    arr = np.asarray(raw, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != d:
        raise ScenarioError(f"{label} must be a list of {d} numbers")
    return arr


def load_scenario(text: str) -> Environment:
    """Parse and validate a scenario document (JSON text)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario is not valid JSON: {exc}") from exc
    return scenario_from_dict(doc)


def scenario_from_dict(doc: dict) -> Environment:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a JSON object")
    try:
        d = int(doc["dimension"])
        bounds = doc["bounds"]
        start = doc["start"]
        goal = doc["goal"]
    except KeyError as exc:
        raise ScenarioError(f"scenario is missing required field {exc}") from exc
    obstacles = []
    for i, entry in enumerate(doc.get("obstacles", [])):
        kind = entry.get("type")
        if kind == "box":
            obs = Box(_parse_point(entry["min"], d, f"obstacles[{i}].min"),
                      _parse_point(entry["max"], d, f"obstacles[{i}].max"))
        elif kind == "sphere":
            obs = Sphere(_parse_point(entry["center"], d, f"obstacles[{i}].center"),
                         float(entry["radius"]))
        else:
            raise ScenarioError(f"obstacles[{i}] has unknown type {kind!r}")
        obstacles.append(obs)
    try:
        return Environment(
            bounds_min=_parse_point(bounds["min"], d, "bounds.min"),
            bounds_max=_parse_point(bounds["max"], d, "bounds.max"),
            obstacles=tuple(obstacles),
            start=_parse_point(start, d, "start"),
            goal=_parse_point(goal, d, "goal"),
            goal_radius=float(doc.get("goal_radius", 0.5)),
            name=str(doc.get("name", "")),
            reference_cost=(
                float(doc["reference_cost"]) if "reference_cost" in doc else None
            ),
        )
    except ScenarioError:
        raise
    except (TypeError, ValueError) as exc:
        raise ScenarioError(str(exc)) from exc


def load_scenario_file(path) -> Environment:
    with open(path, "r", encoding="utf-8") as fh:
        return load_scenario(fh.read())


def serialize_scenario(env: Environment) -> str:
    """Canonical scenario rendering; stable byte-for-byte for round trips."""
    return json.dumps(env.to_dict(), indent=2, sort_keys=True) + "\n"


def builtin_scenario_names() -> list[str]:
    from importlib import resources

    names = []
    for entry in resources.files("pgbrrt.scenarios").iterdir():
        if entry.name.endswith(".json"):
            names.append(entry.name[:-5])
    return sorted(names)


def builtin_scenario(name: str) -> Environment:
    """Load one of the scenarios shipped with the package."""
    from importlib import resources

    ref = resources.files("pgbrrt.scenarios").joinpath(f"{name}.json")
    if not ref.is_file():
        raise ScenarioError(
            f"unknown builtin scenario {name!r}; available: {builtin_scenario_names()}"
        )
    return load_scenario(ref.read_text(encoding="utf-8"))

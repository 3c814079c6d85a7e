"""Deterministic SVG rendering of environments, search trees, and paths."""

from __future__ import annotations

import numpy as np

from .environment import Box, Environment, Sphere
from .tree import MotionTree

__all__ = ["render_svg"]

_TREE_COLORS = ("#1f6fb4", "#c03a2b", "#8e44ad", "#1b9e77")
_PATH_COLOR = "#18a558"
_OBSTACLE_FILL = "#555555"

_SCALE = 64.0  # px per workspace unit
_MARGIN = 12.0


def _fmt(x: float) -> str:
    return f"{x:.3f}".rstrip("0").rstrip(".")


class _Frame:
    """Workspace-to-pixel mapping with the y axis flipped SVG-style."""

    def __init__(self, env: Environment, axes: tuple[int, int]):
        self.ax, self.ay = axes
        self.x0 = env.bounds_min[self.ax]
        self.y1 = env.bounds_max[self.ay]
        self.width = (env.bounds_max[self.ax] - env.bounds_min[self.ax]) * _SCALE + 2 * _MARGIN
        self.height = (env.bounds_max[self.ay] - env.bounds_min[self.ay]) * _SCALE + 2 * _MARGIN

    def px(self, p) -> tuple[float, float]:
        return (
            _MARGIN + (p[self.ax] - self.x0) * _SCALE,
            _MARGIN + (self.y1 - p[self.ay]) * _SCALE,
        )


def render_svg(
    env: Environment,
    trees: tuple[MotionTree, ...] = (),
    best_path: np.ndarray | None = None,
    projection: tuple[int, int] | None = None,
) -> str:
    """Render obstacles, trees (one stroke color each), and the best path.

    3-D scenes are projected orthographically onto the declared axis pair
    (default x-y). Output is byte-identical for identical input.
    """
    d = env.dimension
    if projection is None:
        if d in (2, 3):
            projection = (0, 1)
        else:
            raise ValueError(f"dimension {d} needs an explicit 2-axis projection")
    if len(projection) != 2 or not all(0 <= a < d for a in projection):
        raise ValueError(f"projection {projection} is not a valid axis pair for dimension {d}")
    frame = _Frame(env, tuple(projection))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(frame.width)}" '
        f'height="{_fmt(frame.height)}" viewBox="0 0 {_fmt(frame.width)} {_fmt(frame.height)}">',
        f'<rect x="0" y="0" width="{_fmt(frame.width)}" height="{_fmt(frame.height)}" '
        'fill="#ffffff" stroke="#222222"/>',
    ]
    for obs in env.obstacles:
        if isinstance(obs, Box):
            x, y = frame.px(obs.min_corner)
            x2, y2 = frame.px(obs.max_corner)
            parts.append(
                f'<rect x="{_fmt(min(x, x2))}" y="{_fmt(min(y, y2))}" '
                f'width="{_fmt(abs(x2 - x))}" height="{_fmt(abs(y2 - y))}" '
                f'fill="{_OBSTACLE_FILL}"/>'
            )
        elif isinstance(obs, Sphere):
            cx, cy = frame.px(obs.center)
            parts.append(
                f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(obs.radius * _SCALE)}" '
                f'fill="{_OBSTACLE_FILL}"/>'
            )
    for t_index, tree in enumerate(trees):
        color = _TREE_COLORS[t_index % len(_TREE_COLORS)]
        edges = []
        for v in range(1, tree.size):
            x1, y1 = frame.px(tree.point(tree.parent[v]))
            x2, y2 = frame.px(tree.point(v))
            edges.append(
                f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}"/>'
            )
        parts.append(f'<g stroke="{color}" stroke-width="0.6" data-tree="{t_index}">')
        parts.extend(edges)
        # one marker per vertex so tools can count them
        for v in range(tree.size):
            x, y = frame.px(tree.point(v))
            parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="1" fill="{color}" stroke="none"/>')
        parts.append("</g>")
    if best_path is not None and len(best_path):
        pts = " ".join(
            f"{_fmt(frame.px(p)[0])},{_fmt(frame.px(p)[1])}" for p in np.asarray(best_path)
        )
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{_PATH_COLOR}" stroke-width="2.5"/>'
        )
    sx, sy = frame.px(env.start)
    gx, gy = frame.px(env.goal)
    parts.append(f'<circle cx="{_fmt(sx)}" cy="{_fmt(sy)}" r="4" fill="#000000"/>')
    parts.append(
        f'<circle cx="{_fmt(gx)}" cy="{_fmt(gy)}" r="{_fmt(env.goal_radius * _SCALE)}" '
        'fill="none" stroke="#18a558" stroke-dasharray="4 2"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

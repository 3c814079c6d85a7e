"""Attractive-potential sample guidance.

Random samples are walked downhill toward an attractor pole (the goal, the
start, or both alternating per iteration) in small fixed-length steps. The
walk halts early when the sample gets within a clearance threshold of any
obstacle, which parks guided samples just outside obstacle boundaries instead
of fighting them with a repulsive term.
"""

from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np

__all__ = ["PotentialParams", "attractive_force", "descend", "rgd", "bpg"]


@dataclass(frozen=True)
class PotentialParams:
    """Knobs of the gradient-descent guidance.

    k_p: attractive gain; eps_pot: step length; n_steps: descent iteration
    bound (0 disables guidance); d_obs_star: obstacle clearance at which the
    descent halts.
    """

    k_p: float = 1.0
    eps_pot: float = 0.1
    n_steps: int = 10
    d_obs_star: float = 0.05

    def __post_init__(self):
        if self.k_p <= 0:
            raise ValueError("k_p must be > 0")
        if self.eps_pot <= 0:
            raise ValueError("eps_pot must be > 0")
        if self.n_steps < 0:
            raise ValueError("n_steps must be >= 0")
        if self.d_obs_star <= 0:
            raise ValueError("d_obs_star must be > 0")


def attractive_force(z: np.ndarray, pole: np.ndarray, k_p: float = 1.0) -> np.ndarray:
    """Negative gradient of the quadratic attractive potential 0.5*k_p*||z - pole||^2."""
    z = np.asarray(z, dtype=float)
    pole = np.asarray(pole, dtype=float)
    if z.shape != pole.shape:
        raise ValueError("point and pole must have the same dimension")
    return -k_p * (z - pole)


def descend(z: np.ndarray, pole: np.ndarray, params: PotentialParams, env) -> np.ndarray:
    """Walk ``z`` toward ``pole`` in unit-force steps of length eps_pot.

    Stops when: the descent budget n_steps is spent; an obstacle is within
    d_obs_star; the pole is less than one full step away (zero-force
    singularity, and snapping onto the pole would pile up duplicate
    vertices); or the next step would leave free space. The walk therefore
    never overshoots: ||result - pole|| <= ||z - pole|| unconditionally.
    """
    z = np.asarray(z, dtype=float).copy()
    pole = np.asarray(pole, dtype=float)
    if params.n_steps == 0:
        return z
    # the unit force direction is (pole - z) / ||pole - z|| for any k_p > 0,
    # so the walk itself does not depend on the gain
    dist_z = env.nearest_obstacle_distance(z)
    for _ in range(params.n_steps):
        toward = pole - z
        remaining = math.sqrt(float(toward @ toward))
        if remaining <= params.eps_pot:
            break
        if dist_z <= params.d_obs_star:
            break
        candidate = z + (params.eps_pot / remaining) * toward
        if ((candidate < env.bounds_min).any() or (candidate > env.bounds_max).any()):
            break
        dist_c = env.nearest_obstacle_distance(candidate)
        if dist_c <= 0.0:
            break
        z = candidate
        dist_z = dist_c
    return z


def rgd(z_rand: np.ndarray, z_goal: np.ndarray, params: PotentialParams, env) -> np.ndarray:
    """Single-pole guidance toward the goal (the P-RRT* heuristic)."""
    return descend(z_rand, z_goal, params, env)


def bpg(
    z_rand: np.ndarray,
    i: int,
    z_init: np.ndarray,
    z_goal: np.ndarray,
    params: PotentialParams,
    env,
) -> np.ndarray:
    """Alternating-pole guidance: toward the goal on even iterations, toward
    the start on odd ones, pulling the two bidirectional trees at each other."""
    pole = z_goal if i % 2 == 0 else z_init
    return descend(z_rand, pole, params, env)

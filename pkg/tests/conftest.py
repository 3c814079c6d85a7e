import numpy as np
import pytest

from pgbrrt.environment import Box, Environment, Sphere


@pytest.fixture
def empty_env():
    return Environment(
        bounds_min=np.array([0.0, 0.0]),
        bounds_max=np.array([10.0, 10.0]),
        obstacles=(),
        start=np.array([1.0, 5.0]),
        goal=np.array([9.0, 5.0]),
        goal_radius=0.5,
        name="empty",
    )


@pytest.fixture
def box_env():
    # one box in the middle of a 10x10 square
    return Environment(
        bounds_min=np.array([0.0, 0.0]),
        bounds_max=np.array([10.0, 10.0]),
        obstacles=(Box(np.array([4.0, 3.0]), np.array([6.0, 7.0])),),
        start=np.array([1.0, 5.0]),
        goal=np.array([9.0, 5.0]),
        goal_radius=0.5,
        name="one-box",
    )


@pytest.fixture
def sphere_env():
    return Environment(
        bounds_min=np.array([0.0, 0.0]),
        bounds_max=np.array([10.0, 10.0]),
        obstacles=(Sphere(np.array([5.0, 5.0]), 1.5),),
        start=np.array([1.0, 5.0]),
        goal=np.array([9.0, 5.0]),
        goal_radius=0.5,
        name="one-sphere",
    )


@pytest.fixture
def rng():
    return np.random.default_rng(0)

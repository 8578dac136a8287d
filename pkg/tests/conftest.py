import numpy as np
import pytest

from deskprim.dmp import DmpConfig, rollout, specs_from_weights
from deskprim.scene import Box, Scene, SceneObject

WORKSPACE = Box(min=[0.15, -0.45, 0.0], max=[0.85, 0.45, 0.6])
EE_HOME = np.array([0.45, 0.0, 0.35, 0.0, 0.0, 0.0])

# Smaller grid for simulator behavior tests; numerics tests keep the default.
FAST_DMP = DmpConfig(duration=2.0, steps_per_duration=400)

#: Gripper weight row that holds open and closes around three quarters in.
GRIP_LATE = [-1, -1, -0.5, -0.5, -0.5, -0.5, -0.5, 0.5, 0.2, 0, 0]


def line_rollout(start5, goal5, weights=None, config=FAST_DMP):
    """Roll out a 5-DOF primitive; zero weights give the plain attractor path."""
    w = np.zeros((5, config.basis_count)) if weights is None else np.asarray(weights, float)
    specs = specs_from_weights(w, np.asarray(start5, float), np.asarray(goal5, float), config)
    return rollout(specs, config.dt, config)


def make_object(label, x, y, z=None, yaw=0.0, extents=(0.06, 0.06, 0.04), flags=("graspable",)):
    extents = np.asarray(extents, dtype=float)
    if z is None:
        z = extents[2] / 2.0  # resting on the table
    return SceneObject(label=label, position=np.array([x, y, z]), yaw=yaw,
                       extents=extents, flags=frozenset(flags))


def make_scene(objects, table_height=0.0):
    return Scene(objects=list(objects), table_height=table_height,
                 workspace=Box(min=WORKSPACE.min.copy(), max=WORKSPACE.max.copy()),
                 ee_home=EE_HOME.copy())


@pytest.fixture
def fruit_scene():
    return make_scene([
        make_object("banana", 0.40, -0.15, yaw=0.4, extents=(0.16, 0.04, 0.04)),
        make_object("pear", 0.55, 0.18, extents=(0.06, 0.06, 0.07)),
    ])

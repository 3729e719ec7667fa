import numpy as np
import pytest

from surgiplan import Structure, Volume, VolumeHeader, parse_obj
from surgiplan.pose import Pose
from surgiplan.robot_config import default_registry
from surgiplan.scene import RobotPlacement, Scene


def make_volume(sizes=(2, 2, 2), kind="uint8", values=None,
                directions=None, origin=None, extra=None):
    header = VolumeHeader(sizes=sizes, scalar_kind=kind,
                          space_directions=directions, space_origin=origin,
                          extra_fields=extra or {})
    n = sizes[0] * sizes[1] * sizes[2]
    if values is None:
        values = np.arange(n) % 200
    return Volume(header, np.asarray(values).reshape(n))


@pytest.fixture
def tiny_volume():
    """2x2x2 uint8 fixture with voxel(i,j,k) = i + 2j + 4k."""
    return make_volume()


@pytest.fixture
def random_volume():
    rng = np.random.default_rng(42)
    return make_volume(sizes=(8, 8, 8), kind="float32",
                       values=rng.uniform(0, 100, 512).astype(np.float32))


CUBE_OBJ = b"""\
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 3 2
f 1 4 3
f 5 6 7
f 5 7 8
f 1 2 6
f 1 6 5
f 2 3 7
f 2 7 6
f 3 4 8
f 3 8 7
f 4 1 5
f 4 5 8
"""


@pytest.fixture
def cube_mesh():
    return parse_obj(CUBE_OBJ)[0]


@pytest.fixture
def registry():
    return default_registry()


@pytest.fixture
def planning_scene(cube_mesh, registry):
    """Two robots, one organ proxy, trocar above the target."""
    scene = Scene()
    scene.add_structure(Structure(
        id="pancreas", name="pancreas", mesh=cube_mesh,
        pose=Pose(translation=np.array([99.5, 49.5, 119.5])),
        color=(0.9, 0.7, 0.4, 1.0), mesh_id="cube"))
    scene.add_robot(RobotPlacement(
        id="holder", model_name="ur5", model=registry["ur5"],
        base_pose=Pose(translation=np.array([-500.0, -500.0, 0.0]))))
    scene.add_robot(RobotPlacement(
        id="instrument", model_name="spherical", model=registry["spherical"],
        base_pose=Pose(translation=np.array([100.0, 50.0, 200.0]))))
    scene.trocars["port-a"] = np.array([100.0, 50.0, 200.0])
    scene.trocars["port-b"] = np.array([40.0, -20.0, 210.0])
    scene.targets["lesion"] = np.array([100.0, 50.0, 120.0])
    return scene

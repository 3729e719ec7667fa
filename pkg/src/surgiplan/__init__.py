"""surgiplan: headless surgical pre-planning engine.

CT volume handling (NRRD, MIP, slicing), OBJ anatomy structures, UR5 and
spherical-RCM robot kinematics, collision checking, and insertion planning,
exposed through a Python API, a CLI, and an HTTP service.
"""
from .backend import backend_name
from .camera import Camera
from .errors import EngineError
from .image import Image
from .mesh import Mesh, Structure, mesh_stats, parse_obj, point_mesh_distance, ray_pick
from .mip import ClipSet, render_mip
from .plan import check_collisions, plan_reach, simulate_insertion
from .pose import Pose
from .robot_config import default_registry, load_robot_config
from .scene import (
    Scene,
    Stroke,
    apply_patient_preset,
    load_scene,
    save_scene,
    stroke_edit,
)
from .serial_arm import DHJoint, SerialRobotModel, fk_dh, ik_dls, interpolate_joint, jacobian_fd
from .slices import extract_oblique_slice, extract_slice
from .spherical_arm import (
    SphericalRcmModel,
    counterweight_balance,
    rcm_residual,
    spherical_fk,
    spherical_ik,
)
from .transfer import TransferFunction, ValueWindow, apply_window
from .volume import (
    IndexWorldMap,
    Volume,
    VolumeHeader,
    histogram,
    map_point,
    parse_nrrd,
    sample,
    voxel_at,
    write_nrrd,
)

__version__ = "0.1.0"

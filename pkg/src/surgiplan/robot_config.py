"""Robot configuration files (JSON) and the built-in model registry.

Two kinds: ``serial_dh`` (DH joint table) and ``spherical_rcm``. The UR5
numbers ship as data, sourced from the vendor datasheet; they are inputs,
not asserted constants. See data/schemas/robot_config.schema.json.
"""
from __future__ import annotations

import json
from importlib import resources

import numpy as np

from .errors import MalformedDocument
from .pose import Pose
from .serial_arm import Capsule, DHJoint, SerialRobotModel
from .spherical_arm import SphericalRcmModel


def _pose_from_doc(doc) -> Pose:
    if doc is None:
        return Pose.identity()
    return Pose.from_quat(doc["rotation"], doc["translation"])


def pose_to_doc(pose: Pose) -> dict:
    return {
        "rotation": [float(c) for c in pose.quaternion()],
        "translation": [float(c) for c in pose.t],
    }


def load_robot_config(doc: dict):
    """Build a robot model from a parsed config document."""
    try:
        kind = doc["kind"]
        if kind == "serial_dh":
            joints = [
                DHJoint(
                    a=float(j["a"]),
                    alpha=float(j["alpha"]),
                    d=float(j["d"]),
                    theta_offset=float(j.get("theta_offset", 0.0)),
                    kind=j.get("type", "revolute"),
                    limits=tuple(j.get("limits", (-2 * np.pi, 2 * np.pi))),
                )
                for j in doc["joints"]
            ]
            capsules = {}
            for key, caps in doc.get("link_capsules", {}).items():
                capsules[int(key)] = [
                    Capsule(tuple(c["p0"]), tuple(c["p1"]), float(c["radius"]))
                    for c in caps
                ]
            return SerialRobotModel(
                name=doc["name"],
                joints=joints,
                base_pose=_pose_from_doc(doc.get("base_pose")),
                tool_pose=_pose_from_doc(doc.get("tool_pose")),
                link_capsules=capsules,
            )
        if kind == "spherical_rcm":
            return SphericalRcmModel(
                name=doc["name"],
                arc_radius=float(doc["arc_radius"]),
                azimuth_limits=tuple(doc["azimuth_limits"]),
                arc_limits=tuple(doc["arc_limits"]),
                insertion_limits=tuple(doc["insertion_limits"]),
                instrument_offset=float(doc["instrument_offset"]),
                reference_direction=tuple(
                    doc.get("reference_direction", (0.0, 0.0, -1.0))),
                load_mass=float(doc.get("load_mass", 1.0)),
                load_lever=float(doc.get("load_lever", 300.0)),
                counterweight_lever=float(doc.get("counterweight_lever", 150.0)),
                shaft_radius=float(doc.get("shaft_radius", 5.0)),
            )
        raise MalformedDocument(f"unknown robot kind {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedDocument(f"bad robot config: {exc}") from exc


def load_robot_config_file(path) -> object:
    with open(path, "r", encoding="utf-8") as fh:
        return load_robot_config(json.load(fh))


def builtin_config(name: str) -> dict:
    text = resources.files("surgiplan.data").joinpath(f"{name}.json").read_text()
    return json.loads(text)


def default_registry() -> dict:
    """Built-in models keyed by name: the UR5 arm and the spherical RCM arm."""
    return {
        "ur5": load_robot_config(builtin_config("ur5")),
        "spherical": load_robot_config(builtin_config("spherical")),
    }

"""Planning scene: structures, robots, trocars, targets, annotations, presets.

The scene is a single-writer resource; callers serialize mutations through
one owner (the HTTP layer holds a per-session lock). Serialization is
canonical (sorted keys, compact separators, shortest-round-trip floats) so
save-load-save is byte-identical.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadAngle,
    BadParameter,
    MalformedDocument,
    NoOpenStroke,
    UnknownId,
    UnresolvableReference,
    UnsupportedVersion,
)
from .mesh import Mesh, Structure, mesh_stats
from .pose import Pose, axis_angle_rotation
from .robot_config import default_registry, pose_to_doc
from .spherical_arm import SphericalRcmModel

SCHEMA_VERSION = 1
STROKE_MIN_SPACING = 1.0  # mm

PRESETS = ("supine", "reverse_trendelenburg", "left_lateral_semiprone")


@dataclass
class Stroke:
    id: str
    points: list           # ordered 3-vectors, volume frame mm
    color: tuple = (1.0, 0.0, 0.0, 1.0)
    created_at: float = 0.0


@dataclass
class RobotPlacement:
    id: str
    model_name: str
    model: object
    base_pose: Pose = field(default_factory=Pose.identity)
    joints: np.ndarray = None

    def __post_init__(self):
        if self.joints is None:
            dof = getattr(self.model, "dof", 0)
            self.joints = np.zeros(dof)
        self.joints = np.asarray(self.joints, dtype=float)


@dataclass
class FeasibilityReport:
    feasible: bool
    robot_id: str
    joints: list | None = None
    rcm_residual: float | None = None
    limit_violations: list = field(default_factory=list)
    collision_pairs: list = field(default_factory=list)
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "robot_id": self.robot_id,
            "joints": None if self.joints is None else [float(v) for v in self.joints],
            "rcm_residual": self.rcm_residual,
            "limit_violations": [
                {"joint": j, "amount": a} for j, a in self.limit_violations],
            "collision_pairs": [
                {"a": a, "b": b, "clearance": c} for a, b, c in self.collision_pairs],
            "reason": self.reason,
        }


@dataclass
class Trajectory:
    samples: list  # (s, {robot_id: joints}, tip, phase)

    def to_dict(self) -> dict:
        return {
            "samples": [
                {
                    "s": float(s),
                    "joints": {rid: [float(v) for v in q] for rid, q in joints.items()},
                    "tip": [float(c) for c in tip],
                    "phase": phase,
                }
                for s, joints, tip, phase in self.samples
            ]
        }


class Scene:
    def __init__(self):
        self.schema_version = SCHEMA_VERSION
        self.volume_id: str | None = None
        self.structures: list[Structure] = []
        self.robots: list[RobotPlacement] = []
        self.trocars: dict[str, np.ndarray] = {}
        self.targets: dict[str, np.ndarray] = {}
        self.annotations: list[Stroke] = []
        self.patient_preset = ("supine", 0.0)
        self.table_box = None  # ((min), (max)) world mm, or None
        self._open_stroke: Stroke | None = None
        self._stroke_counter = 0

    # --- lookups ---

    def robot(self, robot_id: str) -> RobotPlacement:
        for r in self.robots:
            if r.id == robot_id:
                return r
        raise UnknownId(f"unknown robot id {robot_id!r}")

    def structure(self, structure_id: str) -> Structure:
        for s in self.structures:
            if s.id == structure_id:
                return s
        raise UnknownId(f"unknown structure id {structure_id!r}")

    def point(self, category: str, name: str) -> np.ndarray:
        table = self.trocars if category == "trocar" else self.targets
        if name in table:
            return np.asarray(table[name], dtype=float)
        if category == "target":
            # fall back to a structure's AABB center as the default target
            for s in self.structures:
                if s.id == name or s.name == name:
                    _, _, center, _ = mesh_stats(s.mesh, s.pose, s.scale)
                    return center
        raise UnknownId(f"unknown {category} {name!r}")

    # --- mutations ---

    def add_structure(self, structure: Structure):
        if any(s.id == structure.id for s in self.structures):
            raise BadParameter(f"duplicate structure id {structure.id!r}")
        self.structures.append(structure)

    def add_robot(self, placement: RobotPlacement):
        if any(r.id == placement.id for r in self.robots):
            raise BadParameter(f"duplicate robot id {placement.id!r}")
        self.robots.append(placement)

    def patient_rotation(self) -> np.ndarray:
        """Rotation applied to volume and structures as a unit.

        Convention: patient lies along +y, world +z up. Reverse Trendelenburg
        tilts head-up about x; left lateral semi-prone rolls 90 deg about y
        plus the anterior tilt.
        """
        kind, angle = self.patient_preset
        rad = math.radians(angle)
        if kind == "supine":
            return np.eye(3)
        if kind == "reverse_trendelenburg":
            return axis_angle_rotation((1.0, 0.0, 0.0), rad)
        if kind == "left_lateral_semiprone":
            return axis_angle_rotation((0.0, 1.0, 0.0), math.radians(90.0) + rad)
        raise BadParameter(f"unknown preset {kind!r}")


def apply_patient_preset(scene: Scene, preset: str, angle_deg: float = None) -> Scene:
    """Set the patient frame preset; robots and trocars are unaffected."""
    if preset not in PRESETS:
        raise BadParameter(f"unknown preset {preset!r}")
    if angle_deg is None:
        angle_deg = {"supine": 0.0, "reverse_trendelenburg": 30.0,
                     "left_lateral_semiprone": 45.0}[preset]
    if not -90.0 <= angle_deg <= 90.0:
        raise BadAngle(f"angle {angle_deg} outside [-90, 90]")
    scene.patient_preset = (preset, float(angle_deg))
    return scene


# ---------------------------------------------------------------------------
# Stroke editing

def stroke_edit(scene: Scene, action: str, point=None, color=None,
                stroke_id: str = None, created_at: float = 0.0,
                min_spacing: float = STROKE_MIN_SPACING) -> Scene:
    """Apply one stroke action: begin / append / end / delete."""
    if action == "begin":
        scene._stroke_counter += 1
        scene._open_stroke = Stroke(
            id=f"stroke-{scene._stroke_counter}",
            points=[],
            color=tuple(color) if color else (1.0, 0.0, 0.0, 1.0),
            created_at=float(created_at),
        )
        return scene
    if action == "append":
        if scene._open_stroke is None:
            raise NoOpenStroke("append without an open stroke")
        p = np.asarray(point, dtype=float)
        pts = scene._open_stroke.points
        if not pts or np.linalg.norm(p - pts[-1]) >= min_spacing:
            pts.append(p)
        return scene
    if action == "end":
        if scene._open_stroke is None:
            raise NoOpenStroke("end without an open stroke")
        stroke = scene._open_stroke
        scene._open_stroke = None
        if stroke.points:
            scene.annotations.append(stroke)
        return scene
    if action == "delete":
        for i, s in enumerate(scene.annotations):
            if s.id == stroke_id:
                del scene.annotations[i]
                return scene
        raise UnknownId(f"unknown stroke id {stroke_id!r}")
    raise BadParameter(f"unknown stroke action {action!r}")


# ---------------------------------------------------------------------------
# Persistence

def _point_table_doc(table: dict) -> dict:
    return {name: [float(c) for c in p] for name, p in table.items()}


def save_scene(scene: Scene) -> bytes:
    doc = {
        "schema_version": scene.schema_version,
        "volume_id": scene.volume_id,
        "structures": [
            {
                "id": s.id,
                "name": s.name,
                "mesh_id": s.mesh_id or s.id,
                "pose": pose_to_doc(s.pose),
                "scale": float(s.scale),
                "visible": s.visible,
                "color": [float(c) for c in s.color],
            }
            for s in scene.structures
        ],
        "robots": [
            {
                "id": r.id,
                "model": r.model_name,
                "base_pose": pose_to_doc(r.base_pose),
                "joints": [float(v) for v in r.joints],
            }
            for r in scene.robots
        ],
        "trocars": _point_table_doc(scene.trocars),
        "targets": _point_table_doc(scene.targets),
        "annotations": [
            {
                "id": s.id,
                "points": [[float(c) for c in p] for p in s.points],
                "color": [float(c) for c in s.color],
                "created_at": float(s.created_at),
            }
            for s in scene.annotations
        ],
        "patient_preset": {
            "kind": scene.patient_preset[0],
            "angle_deg": float(scene.patient_preset[1]),
        },
        "table_box": None if scene.table_box is None else {
            "min": [float(c) for c in scene.table_box[0]],
            "max": [float(c) for c in scene.table_box[1]],
        },
        "stroke_counter": scene._stroke_counter,
    }
    return (json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n").encode()


def load_scene(data: bytes, models: dict = None, meshes: dict = None) -> Scene:
    """Reconstruct a scene document.

    ``models`` maps model names to robot models (defaults to the built-in
    registry); ``meshes`` maps mesh ids to Mesh objects for structures.
    """
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"scene document is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "schema_version" not in doc:
        raise MalformedDocument("scene document missing schema_version")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise UnsupportedVersion(
            f"schema_version {doc['schema_version']} unsupported "
            f"(expected {SCHEMA_VERSION})")
    if models is None:
        models = default_registry()
    meshes = meshes or {}

    scene = Scene()
    try:
        scene.volume_id = doc.get("volume_id")
        for s in doc.get("structures", []):
            mesh_id = s.get("mesh_id", s["id"])
            if mesh_id not in meshes:
                raise UnresolvableReference(f"unknown mesh id {mesh_id!r}")
            scene.add_structure(Structure(
                id=s["id"],
                name=s.get("name", s["id"]),
                mesh=meshes[mesh_id],
                pose=Pose.from_quat(s["pose"]["rotation"],
                                    s["pose"]["translation"]),
                scale=float(s.get("scale", 1.0)),
                visible=bool(s.get("visible", True)),
                color=tuple(s.get("color", (1.0, 1.0, 1.0, 1.0))),
                mesh_id=mesh_id,
            ))
        for r in doc.get("robots", []):
            if r["model"] not in models:
                raise UnresolvableReference(f"unknown robot model {r['model']!r}")
            scene.add_robot(RobotPlacement(
                id=r["id"],
                model_name=r["model"],
                model=models[r["model"]],
                base_pose=Pose.from_quat(r["base_pose"]["rotation"],
                                         r["base_pose"]["translation"]),
                joints=r.get("joints"),
            ))
        scene.trocars = {k: np.asarray(v, dtype=float)
                         for k, v in doc.get("trocars", {}).items()}
        scene.targets = {k: np.asarray(v, dtype=float)
                         for k, v in doc.get("targets", {}).items()}
        for a in doc.get("annotations", []):
            scene.annotations.append(Stroke(
                id=a["id"],
                points=[np.asarray(p, dtype=float) for p in a["points"]],
                color=tuple(a.get("color", (1.0, 0.0, 0.0, 1.0))),
                created_at=float(a.get("created_at", 0.0)),
            ))
        preset = doc.get("patient_preset", {"kind": "supine", "angle_deg": 0.0})
        scene.patient_preset = (preset["kind"], float(preset["angle_deg"]))
        if doc.get("table_box"):
            scene.table_box = (tuple(doc["table_box"]["min"]),
                               tuple(doc["table_box"]["max"]))
        scene._stroke_counter = int(doc.get("stroke_counter", 0))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedDocument(f"bad scene document: {exc}") from exc
    return scene


def is_spherical(placement: RobotPlacement) -> bool:
    return isinstance(placement.model, SphericalRcmModel)

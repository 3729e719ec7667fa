"""Reach planning, collision checking, and insertion simulation."""
from __future__ import annotations

import numpy as np

from .collisions import capsule_box_clearance, capsule_clearance
from .errors import (
    BadParameter,
    InfeasiblePlan,
    LimitViolation,
    NotConverged,
)
from .pose import Pose
from .scene import FeasibilityReport, Scene, Trajectory, is_spherical
from .serial_arm import fk_dh, ik_dls
from .spherical_arm import (
    instrument_capsule,
    rcm_residual,
    spherical_fk,
    spherical_ik,
)

COLLISION_REPORT_THRESHOLD = 10.0  # mm; near misses below this are listed
RCM_TOLERANCE = 1e-6               # mm
DEFAULT_STANDOFF = 150.0           # mm, endoscope tip behind the trocar


def _placed_model(placement):
    """Serial model with the placement's base pose composed in.

    Registry models are shared between placements, so the world mounting
    pose lives on the placement and is applied here.
    """
    import dataclasses

    model = placement.model
    return dataclasses.replace(
        model, base_pose=placement.base_pose @ model.base_pose)


def robot_world_capsules(placement, q=None, rcm=None):
    """World-frame (name, p0, p1, radius) capsules for one robot placement."""
    q = placement.joints if q is None else np.asarray(q, dtype=float)
    out = []
    if is_spherical(placement):
        rcm = placement.base_pose.t if rcm is None else np.asarray(rcm, float)
        p0, p1, radius = instrument_capsule(placement.model, q, rcm)
        out.append((f"{placement.id}.shaft", p0, p1, radius))
    else:
        _, frames = fk_dh(_placed_model(placement), q)
        for link, capsules in placement.model.link_capsules.items():
            frame = frames[link]
            for n, cap in enumerate(capsules):
                out.append((
                    f"{placement.id}.link{link}.c{n}",
                    frame.apply(np.asarray(cap.p0, dtype=float)),
                    frame.apply(np.asarray(cap.p1, dtype=float)),
                    cap.radius,
                ))
    return out


def check_collisions(scene: Scene, states: dict = None,
                     threshold: float = COLLISION_REPORT_THRESHOLD,
                     rcm_points: dict = None):
    """Clearances between robots (and the table box) below the threshold.

    Returns (name_a, name_b, clearance) triples; negative clearance means
    penetration. ``states`` overrides joint states per robot id;
    ``rcm_points`` overrides spherical RCM placement per robot id.
    """
    states = states or {}
    rcm_points = rcm_points or {}
    capsules_by_robot = [
        robot_world_capsules(r, q=states.get(r.id), rcm=rcm_points.get(r.id))
        for r in scene.robots
    ]
    pairs = []
    for a in range(len(scene.robots)):
        for b in range(a + 1, len(scene.robots)):
            for name_a, p0, p1, r1 in capsules_by_robot[a]:
                for name_b, q0, q1, r2 in capsules_by_robot[b]:
                    c = capsule_clearance(p0, p1, r1, q0, q1, r2)
                    if c < threshold:
                        pairs.append((name_a, name_b, float(c)))
    if scene.table_box is not None:
        box_min, box_max = scene.table_box
        for caps in capsules_by_robot:
            for name, p0, p1, radius in caps:
                c = capsule_box_clearance(p0, p1, radius, box_min, box_max)
                if c < threshold:
                    pairs.append((name, "table", float(c)))
    return pairs


def _aim_pose(trocar, target, standoff: float) -> Pose:
    """Tool pose whose z axis runs from standoff behind the trocar toward the target."""
    direction = np.asarray(target, float) - np.asarray(trocar, float)
    norm = np.linalg.norm(direction)
    if norm < 1e-9:
        raise BadParameter("target coincides with the trocar")
    z = direction / norm
    seed = np.array([0.0, 0.0, 1.0])
    if np.linalg.norm(np.cross(seed, z)) < 1e-6:
        seed = np.array([1.0, 0.0, 0.0])
    x = np.cross(seed, z)
    x /= np.linalg.norm(x)
    y = np.cross(z, x)
    rotation = np.column_stack([x, y, z])
    position = np.asarray(trocar, float) - standoff * z
    return Pose(rotation, position)


def plan_reach(scene: Scene, robot_id: str, trocar_id: str, target_id: str,
               standoff: float = DEFAULT_STANDOFF) -> FeasibilityReport:
    """Plan a reach-to-target through a trocar; failures land in the report."""
    placement = scene.robot(robot_id)
    trocar = scene.point("trocar", trocar_id)
    target = scene.point("target", target_id)

    if is_spherical(placement):
        try:
            q = spherical_ik(placement.model, trocar, target)
        except LimitViolation as exc:
            return FeasibilityReport(
                feasible=False, robot_id=robot_id,
                limit_violations=[(exc.joint, exc.amount)],
                reason=f"{exc.name}: {exc}")
        axis, tip, _ = spherical_fk(placement.model, q, trocar, clamped=False)
        residual = rcm_residual(tip, axis, trocar)
        rcm_override = {robot_id: trocar}
    else:
        target_pose = _aim_pose(trocar, target, standoff)
        model = _placed_model(placement)
        # DLS can stall in a local minimum; retry from deterministic seeds
        rng = np.random.default_rng(0)
        seeds = [np.asarray(placement.joints, dtype=float)]
        seeds += [model.random_q(rng) for _ in range(7)]
        q = None
        failure = None
        for seed in seeds:
            try:
                q, _ = ik_dls(model, target_pose, seed)
                break
            except NotConverged as exc:
                if failure is None or exc.pos_residual < failure.pos_residual:
                    failure = exc
        if q is None:
            return FeasibilityReport(
                feasible=False, robot_id=robot_id, joints=list(failure.best_q),
                reason=f"{failure.name}: {failure}")
        pose, _ = fk_dh(model, q)
        residual = rcm_residual(pose.t, pose.r[:, 2], trocar)
        rcm_override = {}

    all_pairs = check_collisions(scene, states={robot_id: q},
                                 rcm_points=rcm_override)
    colliding = [p for p in all_pairs if p[2] < 0]
    feasible = not colliding and residual <= max(RCM_TOLERANCE, 1e-3)
    return FeasibilityReport(
        feasible=feasible,
        robot_id=robot_id,
        joints=[float(v) for v in q],
        rcm_residual=float(residual),
        collision_pairs=colliding,
        reason="" if feasible else "collision detected" if colliding
        else "rcm residual above tolerance",
    )


def simulate_insertion(scene: Scene, robot_id: str, trocar_id: str,
                       target_id: str, n_steps: int,
                       report: FeasibilityReport = None) -> Trajectory:
    """Two-phase trajectory: dock with the instrument retracted, then insert."""
    if n_steps < 2:
        raise BadParameter(f"n_steps must be >= 2, got {n_steps}")
    placement = scene.robot(robot_id)
    if not is_spherical(placement):
        raise BadParameter(
            "insertion simulation applies to the spherical instrument arm")
    if report is None:
        report = plan_reach(scene, robot_id, trocar_id, target_id)
    if not report.feasible:
        raise InfeasiblePlan(f"plan is infeasible: {report.reason}")

    trocar = scene.point("trocar", trocar_id)
    model = placement.model
    q_cur = np.asarray(placement.joints, dtype=float)
    q_plan = np.asarray(report.joints, dtype=float)
    d_ins_min = model.insertion_limits[0]

    others = {
        r.id: [float(v) for v in r.joints]
        for r in scene.robots if r.id != robot_id
    }
    samples = []
    s_values = np.linspace(0.0, 1.0, n_steps)
    for s in s_values:
        if s <= 0.5:
            u = s / 0.5
            q = np.array([
                (1 - u) * q_cur[0] + u * q_plan[0],
                (1 - u) * q_cur[1] + u * q_plan[1],
                (1 - u) * q_cur[2] + u * d_ins_min,
            ])
            phase = "position" if s < 0.5 else "insert"
        else:
            u = (s - 0.5) / 0.5
            q = np.array([
                q_plan[0],
                q_plan[1],
                (1 - u) * d_ins_min + u * q_plan[2],
            ])
            phase = "insert"
        _, tip, _ = spherical_fk(model, q, trocar, clamped=False)
        joints = dict(others)
        joints[robot_id] = [float(v) for v in q]
        samples.append((float(s), joints, tip, phase))
    return Trajectory(samples)

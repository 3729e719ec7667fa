"""DH-parameterized serial arms: forward kinematics, finite-difference
Jacobian, and damped-least-squares inverse kinematics."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadParameter, LengthMismatch, NotConverged
from .pose import Pose, rotation_log


@dataclass(frozen=True)
class DHJoint:
    a: float                  # link length, mm
    alpha: float              # link twist, rad
    d: float                  # link offset, mm
    theta_offset: float = 0.0
    kind: str = "revolute"    # "revolute" | "prismatic"
    limits: tuple = (-2 * np.pi, 2 * np.pi)

    def __post_init__(self):
        if self.kind not in ("revolute", "prismatic"):
            raise BadParameter(f"unknown joint kind {self.kind!r}")
        if not self.limits[0] < self.limits[1]:
            raise BadParameter(f"joint limits {self.limits} are empty")


@dataclass
class Capsule:
    """Collision proxy: a segment swept by a sphere, in some link frame."""
    p0: tuple
    p1: tuple
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise BadParameter(f"capsule radius must be positive, got {self.radius}")


@dataclass
class SerialRobotModel:
    name: str
    joints: list
    base_pose: Pose = field(default_factory=Pose.identity)
    tool_pose: Pose = field(default_factory=Pose.identity)
    link_capsules: dict = field(default_factory=dict)  # link index -> [Capsule]

    def __post_init__(self):
        if not self.joints:
            raise BadParameter("serial robot needs at least one joint")

    @property
    def dof(self) -> int:
        return len(self.joints)

    def clamp(self, q: np.ndarray) -> np.ndarray:
        lo = np.array([j.limits[0] for j in self.joints])
        hi = np.array([j.limits[1] for j in self.joints])
        return np.clip(q, lo, hi)

    def random_q(self, rng) -> np.ndarray:
        lo = np.array([j.limits[0] for j in self.joints])
        hi = np.array([j.limits[1] for j in self.joints])
        return rng.uniform(lo, hi)


def _check_length(model: SerialRobotModel, q) -> np.ndarray:
    q = np.asarray(q, dtype=float).ravel()
    if q.size != model.dof:
        raise LengthMismatch(
            f"joint vector has {q.size} values, model has {model.dof} joints")
    return q


def dh_transform(joint: DHJoint, qi: float) -> np.ndarray:
    """4x4 transform for one joint: Rz(theta) Tz(d) Tx(a) Rx(alpha)."""
    theta = joint.theta_offset + (qi if joint.kind == "revolute" else 0.0)
    d = joint.d + (qi if joint.kind == "prismatic" else 0.0)
    ct, st = np.cos(theta), np.sin(theta)
    ca, sa = np.cos(joint.alpha), np.sin(joint.alpha)
    return np.array([
        [ct, -st * ca, st * sa, joint.a * ct],
        [st, ct * ca, -ct * sa, joint.a * st],
        [0.0, sa, ca, d],
        [0.0, 0.0, 0.0, 1.0],
    ])


def fk_dh(model: SerialRobotModel, q) -> tuple[Pose, list[Pose]]:
    """Tool pose and per-link frames (base-relative chain after each joint)."""
    q = _check_length(model, q)
    t = model.base_pose.matrix()
    frames = []
    for joint, qi in zip(model.joints, q):
        t = t @ dh_transform(joint, qi)
        frames.append(Pose.from_matrix(t))
    tool = Pose.from_matrix(t).compose(model.tool_pose)
    return tool, frames


def jacobian_fd(model: SerialRobotModel, q, epsilon: float = 1e-6) -> np.ndarray:
    """6xN central-difference Jacobian: rows = (linear mm, angular rad)."""
    if epsilon <= 0:
        raise BadParameter(f"epsilon must be positive, got {epsilon}")
    q = _check_length(model, q)
    jac = np.zeros((6, model.dof))
    for i in range(model.dof):
        qp = q.copy()
        qm = q.copy()
        qp[i] += epsilon
        qm[i] -= epsilon
        pose_p, _ = fk_dh(model, qp)
        pose_m, _ = fk_dh(model, qm)
        jac[:3, i] = (pose_p.t - pose_m.t) / (2 * epsilon)
        jac[3:, i] = rotation_log(pose_p.r @ pose_m.r.T) / (2 * epsilon)
    return jac


def pose_error(target: Pose, current: Pose) -> np.ndarray:
    """Twist error (linear, angular) taking current to target."""
    return np.concatenate([target.t - current.t,
                           rotation_log(target.r @ current.r.T)])


def ik_dls(model: SerialRobotModel, target: Pose, seed,
           tol_pos: float = 1e-3, tol_rot: float = 1e-6,
           max_iter: int = 200, damping: float = 0.05):
    """Damped-least-squares IK. Returns (q, iterations).

    Raises NotConverged (carrying the best solution and residuals) when the
    iteration cap is hit.
    """
    q = model.clamp(_check_length(model, seed))
    best_q = q.copy()
    best_res = np.inf
    lam2 = damping * damping
    for it in range(max_iter + 1):
        pose, _ = fk_dh(model, q)
        err = pose_error(target, pose)
        pos_res = np.linalg.norm(err[:3])
        rot_res = np.linalg.norm(err[3:])
        if pos_res <= tol_pos and rot_res <= tol_rot:
            return q, it
        if pos_res < best_res:
            best_res = pos_res
            best_q = q.copy()
        if it == max_iter:
            break
        jac = jacobian_fd(model, q)
        lhs = jac.T @ jac + lam2 * np.eye(model.dof)
        dq = np.linalg.solve(lhs, jac.T @ err)
        q = model.clamp(q + dq)
    pose, _ = fk_dh(model, best_q)
    err = pose_error(target, pose)
    raise NotConverged(
        f"IK did not converge in {max_iter} iterations "
        f"(pos residual {np.linalg.norm(err[:3]):.6g} mm)",
        best_q=best_q,
        pos_residual=float(np.linalg.norm(err[:3])),
        rot_residual=float(np.linalg.norm(err[3:])),
    )


def interpolate_joint(q0, q1, s: float) -> np.ndarray:
    """Elementwise linear joint interpolation for s in [0, 1]."""
    q0 = np.asarray(q0, dtype=float).ravel()
    q1 = np.asarray(q1, dtype=float).ravel()
    if q0.size != q1.size:
        raise LengthMismatch(f"lengths differ: {q0.size} vs {q1.size}")
    if not 0.0 <= s <= 1.0:
        raise BadParameter(f"s must lie in [0, 1], got {s}")
    return (1.0 - s) * q0 + s * q1

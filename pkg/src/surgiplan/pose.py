"""Rigid poses: 3x3 rotation + translation, with quaternion conversions."""
from __future__ import annotations

import numpy as np

from .errors import BadParameter


class Pose:
    """Rigid transform. Rotation stored as an orthonormal 3x3 matrix."""

    __slots__ = ("r", "t")

    def __init__(self, rotation=None, translation=None, check: bool = True):
        r = np.eye(3) if rotation is None else np.asarray(rotation, dtype=float)
        t = np.zeros(3) if translation is None else np.asarray(translation, dtype=float)
        if check:
            if r.shape != (3, 3):
                raise BadParameter(f"rotation must be 3x3, got {r.shape}")
            if np.abs(r @ r.T - np.eye(3)).max() > 1e-8:
                raise BadParameter("rotation matrix is not orthonormal")
        self.r = r
        self.t = t

    @classmethod
    def identity(cls) -> "Pose":
        return cls()

    def compose(self, other: "Pose") -> "Pose":
        """self applied after other: (self ∘ other)(p) = self(other(p))."""
        return Pose(self.r @ other.r, self.r @ other.t + self.t, check=False)

    def __matmul__(self, other: "Pose") -> "Pose":
        return self.compose(other)

    def inverse(self) -> "Pose":
        rt = self.r.T
        return Pose(rt, -(rt @ self.t), check=False)

    def apply(self, points):
        points = np.asarray(points, dtype=float)
        return points @ self.r.T + self.t

    def matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.r
        m[:3, 3] = self.t
        return m

    @classmethod
    def from_matrix(cls, m) -> "Pose":
        m = np.asarray(m, dtype=float)
        return cls(m[:3, :3], m[:3, 3])

    def quaternion(self) -> np.ndarray:
        """Unit quaternion (w, x, y, z), w >= 0."""
        return rotation_to_quat(self.r)

    @classmethod
    def from_quat(cls, quat, translation=None) -> "Pose":
        return cls(quat_to_rotation(quat), translation)

    def almost_equal(self, other: "Pose", tol: float = 1e-9) -> bool:
        return (np.abs(self.r - other.r).max() <= tol
                and np.abs(self.t - other.t).max() <= tol)


def rotation_to_quat(r: np.ndarray) -> np.ndarray:
    m = np.asarray(r, dtype=float)
    tr = m[0, 0] + m[1, 1] + m[2, 2]
    if tr > 0:
        s = np.sqrt(tr + 1.0) * 2
        w = 0.25 * s
        x = (m[2, 1] - m[1, 2]) / s
        y = (m[0, 2] - m[2, 0]) / s
        z = (m[1, 0] - m[0, 1]) / s
    elif m[0, 0] > m[1, 1] and m[0, 0] > m[2, 2]:
        s = np.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2
        w = (m[2, 1] - m[1, 2]) / s
        x = 0.25 * s
        y = (m[0, 1] + m[1, 0]) / s
        z = (m[0, 2] + m[2, 0]) / s
    elif m[1, 1] > m[2, 2]:
        s = np.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2
        w = (m[0, 2] - m[2, 0]) / s
        x = (m[0, 1] + m[1, 0]) / s
        y = 0.25 * s
        z = (m[1, 2] + m[2, 1]) / s
    else:
        s = np.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2
        w = (m[1, 0] - m[0, 1]) / s
        x = (m[0, 2] + m[2, 0]) / s
        y = (m[1, 2] + m[2, 1]) / s
        z = 0.25 * s
    q = np.array([w, x, y, z])
    if q[0] < 0:
        q = -q
    return q / np.linalg.norm(q)


def quat_to_rotation(q) -> np.ndarray:
    w, x, y, z = np.asarray(q, dtype=float) / np.linalg.norm(q)
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def rotation_log(r: np.ndarray) -> np.ndarray:
    """Axis-angle vector of a rotation matrix (undefined only at angle pi)."""
    r = np.asarray(r, dtype=float)
    cos_a = np.clip((np.trace(r) - 1.0) / 2.0, -1.0, 1.0)
    axis = np.array([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]])
    sin_a = np.linalg.norm(axis) / 2.0
    # atan2 keeps the angle well conditioned near identity, unlike acos
    angle = np.arctan2(sin_a, cos_a)
    if angle < 1e-12:
        return np.zeros(3)
    if sin_a < 1e-12:
        angle = np.pi
        # angle near pi: recover the axis from the symmetric part
        d = np.diagonal(r)
        axis = np.sqrt(np.maximum((d + 1.0) / 2.0, 0.0))
        # fix signs from off-diagonals
        if axis[0] > 0:
            axis[1] = np.copysign(axis[1], r[0, 1])
            axis[2] = np.copysign(axis[2], r[0, 2])
        elif axis[1] > 0:
            axis[2] = np.copysign(axis[2], r[1, 2])
        return angle * axis / np.linalg.norm(axis)
    return angle * axis / (2.0 * sin_a)


def axis_angle_rotation(axis, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    x, y, z = axis
    c, s = np.cos(angle), np.sin(angle)
    cc = 1 - c
    return np.array([
        [c + x * x * cc, x * y * cc - z * s, x * z * cc + y * s],
        [y * x * cc + z * s, c + y * y * cc, y * z * cc - x * s],
        [z * x * cc - y * s, z * y * cc + x * s, c + z * z * cc],
    ])

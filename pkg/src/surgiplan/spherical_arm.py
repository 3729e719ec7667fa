"""Spherical remote-center-of-motion arm.

Three joints: azimuth rotation about the world vertical, arc-rail travel
(a prismatic drive on a circular rail of radius R, so polar tilt
phi = d_arc / R), and instrument insertion along the tool axis. The
instrument axis passes through the RCM point for every configuration.

The reference direction (instrument axis at zero joints) must be vertical;
the default points straight down, "under the insertion point".
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadLeverArm, BadParameter, DegenerateTarget, LimitViolation

JOINT_NAMES = ("theta_az", "d_arc", "d_ins")


@dataclass
class SphericalRcmModel:
    name: str = "spherical"
    arc_radius: float = 200.0                    # R, mm
    azimuth_limits: tuple = (-np.pi, np.pi)      # rad
    arc_limits: tuple = (0.0, 261.799)           # mm of rail travel (phi 0..75 deg)
    insertion_limits: tuple = (0.0, 250.0)       # mm
    instrument_offset: float = 100.0             # L0, mm
    reference_direction: tuple = (0.0, 0.0, -1.0)
    load_mass: float = 1.0                       # kg
    load_lever: float = 300.0                    # mm
    counterweight_lever: float = 150.0           # mm
    shaft_radius: float = 5.0                    # instrument capsule radius, mm
    column_capsule: dict | None = None           # optional static support capsule

    def __post_init__(self):
        if self.arc_radius <= 0:
            raise BadParameter(f"arc radius must be positive, got {self.arc_radius}")
        for name, lim in (("azimuth", self.azimuth_limits),
                          ("arc", self.arc_limits),
                          ("insertion", self.insertion_limits)):
            if not lim[0] < lim[1]:
                raise BadParameter(f"{name} limit interval {lim} is empty")
        ref = np.asarray(self.reference_direction, dtype=float)
        if abs(np.linalg.norm(ref) - 1.0) > 1e-9:
            raise BadParameter("reference direction must be unit length")
        if abs(abs(ref[2]) - 1.0) > 1e-9:
            raise BadParameter("reference direction must be vertical")

    @property
    def dof(self) -> int:
        return 3

    def limits(self) -> list[tuple]:
        return [self.azimuth_limits, self.arc_limits, self.insertion_limits]

    def check_limits(self, q) -> list[tuple]:
        """Per-joint limit violations as (joint name, overshoot)."""
        out = []
        for name, value, (lo, hi) in zip(JOINT_NAMES, q, self.limits()):
            if value < lo:
                out.append((name, float(value - lo)))
            elif value > hi:
                out.append((name, float(value - hi)))
        return out

    def random_q(self, rng) -> np.ndarray:
        lims = np.array(self.limits())
        return rng.uniform(lims[:, 0], lims[:, 1])


def _axis_direction(model: SphericalRcmModel, theta_az: float,
                    phi: float) -> np.ndarray:
    ref = np.asarray(model.reference_direction, dtype=float)
    # tilt ref by phi toward the zero-azimuth horizontal (+x), then rotate
    # about the world vertical by theta_az
    horiz = np.array([np.cos(theta_az), np.sin(theta_az), 0.0])
    return np.cos(phi) * ref + np.sin(phi) * horiz


def spherical_fk(model: SphericalRcmModel, q, rcm, clamped: bool = True):
    """FK: (unit axis direction, tip point, frame points).

    Raises LimitViolation in clamped mode when q leaves the joint limits.
    """
    q = np.asarray(q, dtype=float).ravel()
    if q.size != 3:
        raise BadParameter(f"spherical arm expects 3 joints, got {q.size}")
    if clamped:
        violations = model.check_limits(q)
        if violations:
            name, amount = violations[0]
            raise LimitViolation(
                f"joint {name} violates its limits by {amount:.6g}",
                joint=name, amount=amount)
    theta_az, d_arc, d_ins = q
    rcm = np.asarray(rcm, dtype=float)
    phi = d_arc / model.arc_radius
    axis = _axis_direction(model, theta_az, phi)
    tip = rcm + (d_ins - model.instrument_offset) * axis
    carriage = tip - (model.instrument_offset + d_ins) * axis
    frames = {"rcm": rcm, "carriage": carriage, "tip": tip}
    return axis, tip, frames


def spherical_ik(model: SphericalRcmModel, rcm, target) -> np.ndarray:
    """Closed-form IK aiming the instrument axis from the RCM at the target."""
    rcm = np.asarray(rcm, dtype=float)
    target = np.asarray(target, dtype=float)
    delta = target - rcm
    dist = np.linalg.norm(delta)
    if dist < 1e-12:
        raise DegenerateTarget("target coincides with the RCM point")
    direction = delta / dist
    ref = np.asarray(model.reference_direction, dtype=float)
    phi = np.arccos(np.clip(np.dot(ref, direction), -1.0, 1.0))
    if np.hypot(direction[0], direction[1]) < 1e-12:
        theta_az = 0.0
    else:
        theta_az = np.arctan2(direction[1], direction[0])
    q = np.array([theta_az, phi * model.arc_radius,
                  dist + model.instrument_offset])
    violations = model.check_limits(q)
    if violations:
        name, amount = violations[0]
        raise LimitViolation(
            f"joint {name} violates its limits by {amount:.6g}",
            joint=name, amount=amount)
    return q


def rcm_residual(line_point, line_direction, rcm) -> float:
    """Perpendicular distance from the RCM point to an infinite line."""
    p = np.asarray(line_point, dtype=float)
    d = np.asarray(line_direction, dtype=float)
    v = np.asarray(rcm, dtype=float) - p
    return float(np.linalg.norm(v - np.dot(v, d) * d))


def counterweight_balance(m_load: float, r_load: float, r_cw: float) -> float:
    """Static moment balance about the pivot: m_cw * r_cw = m_load * r_load."""
    if r_cw <= 0:
        raise BadLeverArm(f"counterweight lever arm must be positive, got {r_cw}")
    if m_load < 0 or r_load < 0:
        raise BadParameter("load mass and lever arm must be non-negative")
    return m_load * r_load / r_cw


def instrument_capsule(model: SphericalRcmModel, q, rcm):
    """World-frame shaft capsule endpoints and radius at configuration q."""
    axis, tip, frames = spherical_fk(model, q, rcm, clamped=False)
    return frames["carriage"], tip, model.shaft_radius

"""Capsule-based collision clearance checks."""
from __future__ import annotations

import numpy as np


def segment_segment_distance(p0, p1, q0, q1) -> float:
    """Minimum distance between segments [p0, p1] and [q0, q1].

    Standard closest-point parameterization (geomalgorithms.com a07).
    """
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    q0 = np.asarray(q0, dtype=float)
    q1 = np.asarray(q1, dtype=float)
    u = p1 - p0
    v = q1 - q0
    w = p0 - q0
    a = np.dot(u, u)
    b = np.dot(u, v)
    c = np.dot(v, v)
    d = np.dot(u, w)
    e = np.dot(v, w)
    denom = a * c - b * b

    eps = 1e-12
    sn, sd = 0.0, denom
    tn, td = 0.0, denom
    if denom < eps:
        sn, sd = 0.0, 1.0
        tn, td = e, c
    else:
        sn = b * e - c * d
        tn = a * e - b * d
        if sn < 0.0:
            sn = 0.0
            tn, td = e, c
        elif sn > sd:
            sn = sd
            tn, td = e + b, c

    if tn < 0.0:
        tn = 0.0
        if -d < 0.0:
            sn = 0.0
        elif -d > a:
            sn = sd
        else:
            sn, sd = -d, a
    elif tn > td:
        tn = td
        if (-d + b) < 0.0:
            sn = 0.0
        elif (-d + b) > a:
            sn = sd
        else:
            sn, sd = -d + b, a

    s = 0.0 if abs(sd) < eps else sn / sd
    t = 0.0 if abs(td) < eps else tn / td
    closest = w + s * u - t * v
    return float(np.linalg.norm(closest))


def capsule_clearance(p0, p1, r1, q0, q1, r2) -> float:
    """Surface clearance of two capsules; negative means penetration."""
    return segment_segment_distance(p0, p1, q0, q1) - r1 - r2


def _point_box_distance(p, box_min, box_max) -> float:
    d = np.maximum(np.maximum(box_min - p, 0.0), p - box_max)
    return float(np.linalg.norm(d))


def segment_box_distance(p0, p1, box_min, box_max) -> float:
    """Distance from a segment to an AABB.

    The point-to-box distance is convex along the segment, so golden-section
    search converges to the global minimum.
    """
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    box_min = np.asarray(box_min, dtype=float)
    box_max = np.asarray(box_max, dtype=float)

    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    lo, hi = 0.0, 1.0
    x1 = hi - inv_phi * (hi - lo)
    x2 = lo + inv_phi * (hi - lo)
    f1 = _point_box_distance(p0 + x1 * (p1 - p0), box_min, box_max)
    f2 = _point_box_distance(p0 + x2 * (p1 - p0), box_min, box_max)
    for _ in range(120):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_phi * (hi - lo)
            f1 = _point_box_distance(p0 + x1 * (p1 - p0), box_min, box_max)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_phi * (hi - lo)
            f2 = _point_box_distance(p0 + x2 * (p1 - p0), box_min, box_max)
    return min(f1, f2)


def capsule_box_clearance(p0, p1, radius, box_min, box_max) -> float:
    return segment_box_distance(p0, p1, box_min, box_max) - radius

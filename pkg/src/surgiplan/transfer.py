"""Value windows and transfer functions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadRange


@dataclass(frozen=True)
class ValueWindow:
    """Visible scalar range [lo, hi]; the radiology window analog."""
    lo: float
    hi: float

    def __post_init__(self):
        if not self.hi > self.lo:
            raise BadRange(f"window hi ({self.hi}) must exceed lo ({self.lo})")


def apply_window(value, w: ValueWindow):
    """Normalize a scalar (or array) into [0, 1] over the window, clamped."""
    return np.clip((np.asarray(value, dtype=np.float64) - w.lo) / (w.hi - w.lo),
                   0.0, 1.0)


class TransferFunction:
    """Piecewise-linear map from normalized scalar to RGBA, clamped at the ends.

    Control points are (position, (r, g, b, a)) with strictly increasing
    positions and channels in [0, 1].
    """

    def __init__(self, points):
        if len(points) < 2:
            raise BadRange("transfer function needs at least 2 control points")
        pos = np.array([p for p, _ in points], dtype=np.float64)
        rgba = np.array([c for _, c in points], dtype=np.float64)
        if not np.all(np.diff(pos) > 0):
            raise BadRange("control point positions must strictly increase")
        if rgba.shape[1] != 4 or rgba.min() < 0 or rgba.max() > 1:
            raise BadRange("RGBA channels must lie in [0, 1]")
        self.positions = pos
        self.rgba = rgba

    def __call__(self, x):
        """Evaluate at scalar or array x; returns (..., 4) float in [0, 1]."""
        x = np.asarray(x, dtype=np.float64)
        out = np.empty(x.shape + (4,), dtype=np.float64)
        for c in range(4):
            out[..., c] = np.interp(x, self.positions, self.rgba[:, c])
        return out

    @classmethod
    def grayscale_ramp(cls) -> "TransferFunction":
        """Default: gray ramp 0->1 with opacity ramp 0->1."""
        return cls([(0.0, (0.0, 0.0, 0.0, 0.0)), (1.0, (1.0, 1.0, 1.0, 1.0))])

    def to_dict(self) -> dict:
        return {
            "points": [
                [float(p), [float(c) for c in ch]]
                for p, ch in zip(self.positions, self.rgba)
            ]
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "TransferFunction":
        return cls([(p, tuple(ch)) for p, ch in doc["points"]])

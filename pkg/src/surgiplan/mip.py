"""Maximum intensity projection rendering."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._mip_kernels import mip_march
from .camera import Camera
from .errors import BadRange, BadStep
from .image import Image
from .transfer import TransferFunction, ValueWindow, apply_window
from .volume import Volume, min_voxel_pitch


@dataclass(frozen=True)
class ClipSet:
    """Cut-out box (interior discarded) and section plane (negative side discarded)."""
    cut_out_box: tuple | None = None      # (min_xyz, max_xyz) in world mm
    section_plane: tuple | None = None    # (point, unit normal)

    def __post_init__(self):
        if self.cut_out_box is not None:
            lo, hi = (np.asarray(v, dtype=float) for v in self.cut_out_box)
            if not np.all(lo < hi):
                raise BadRange("cut_out_box min must be < max on every axis")
        if self.section_plane is not None:
            _, n = self.section_plane
            if abs(np.linalg.norm(np.asarray(n, dtype=float)) - 1.0) > 1e-9:
                raise BadRange("section plane normal must be unit length")

    def to_dict(self) -> dict:
        doc = {}
        if self.cut_out_box is not None:
            doc["cut_out_box"] = {
                "min": [float(c) for c in self.cut_out_box[0]],
                "max": [float(c) for c in self.cut_out_box[1]],
            }
        if self.section_plane is not None:
            doc["section_plane"] = {
                "point": [float(c) for c in self.section_plane[0]],
                "normal": [float(c) for c in self.section_plane[1]],
            }
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "ClipSet":
        box = None
        plane = None
        if doc.get("cut_out_box"):
            box = (tuple(doc["cut_out_box"]["min"]),
                   tuple(doc["cut_out_box"]["max"]))
        if doc.get("section_plane"):
            plane = (tuple(doc["section_plane"]["point"]),
                     tuple(doc["section_plane"]["normal"]))
        return cls(cut_out_box=box, section_plane=plane)


def mip_project(v: Volume, cam: Camera, w: ValueWindow,
                clips: ClipSet | None = None, step: float | None = None,
                sampling: str = "trilinear"):
    """March all camera rays; returns (per-pixel max, hit mask).

    Samples clipped away or outside the window are excluded from the max;
    pixels with no surviving sample have ``hit`` False.
    """
    if step is None:
        step = min_voxel_pitch(v)
    if step <= 0:
        raise BadStep(f"step must be positive, got {step}")
    clips = clips or ClipSet()
    origins, dirs = cam.rays()
    grid = v.grid().astype(np.float32)
    m = np.ascontiguousarray(v.map.inverse[:3, :3])
    b = np.ascontiguousarray(v.map.inverse[:3, 3])

    if clips.cut_out_box is not None:
        box_min = np.asarray(clips.cut_out_box[0], dtype=np.float64)
        box_max = np.asarray(clips.cut_out_box[1], dtype=np.float64)
        use_box = True
    else:
        box_min = np.zeros(3)
        box_max = np.zeros(3)
        use_box = False
    if clips.section_plane is not None:
        plane_p = np.asarray(clips.section_plane[0], dtype=np.float64)
        plane_n = np.asarray(clips.section_plane[1], dtype=np.float64)
        use_plane = True
    else:
        plane_p = np.zeros(3)
        plane_n = np.zeros(3)
        use_plane = False

    best, hit = mip_march(
        grid, m, b, origins, dirs, float(step), float(w.lo), float(w.hi),
        use_box, box_min, box_max, use_plane, plane_p, plane_n,
        sampling == "nearest",
    )
    return best, hit


def render_mip(v: Volume, cam: Camera, w: ValueWindow,
               tf: TransferFunction | None = None,
               clips: ClipSet | None = None, step: float | None = None,
               sampling: str = "trilinear") -> Image:
    """Render a MIP image: transfer function applied to the windowed ray maxima.

    Rays with no surviving sample get the transfer function at 0 with alpha 0.
    """
    tf = tf or TransferFunction.grayscale_ramp()
    best, hit = mip_project(v, cam, w, clips=clips, step=step, sampling=sampling)
    normalized = np.where(hit, apply_window(best, w), 0.0)
    rgba = tf(normalized)
    rgba[~hit] = tf(0.0)
    px = np.floor(rgba * 255.0 + 0.5).astype(np.uint8)
    px[~hit, 3] = 0
    return Image(px)

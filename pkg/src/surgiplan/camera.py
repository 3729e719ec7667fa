"""Cameras and per-pixel ray generation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadParameter


def _normalize(v):
    v = np.asarray(v, dtype=np.float64)
    n = np.linalg.norm(v)
    if n < 1e-12:
        raise BadParameter("zero-length vector")
    return v / n


@dataclass(frozen=True)
class Camera:
    kind: str                      # "orthographic" | "perspective"
    eye: tuple
    look_at: tuple
    up: tuple = (0.0, 0.0, 1.0)
    width: int = 512
    height: int = 512
    ortho_width: float = 300.0     # mm, orthographic image-plane width
    fov_y: float = 0.9             # rad, perspective vertical field of view

    def __post_init__(self):
        if self.kind not in ("orthographic", "perspective"):
            raise BadParameter(f"unknown camera kind {self.kind!r}")
        if self.width < 1 or self.height < 1:
            raise BadParameter("pixel dimensions must be >= 1")
        eye = np.asarray(self.eye, dtype=float)
        look = np.asarray(self.look_at, dtype=float)
        if np.allclose(eye, look):
            raise BadParameter("eye must differ from look_at")
        f = _normalize(look - eye)
        if np.linalg.norm(np.cross(f, _normalize(self.up))) < 1e-9:
            raise BadParameter("up is parallel to the view direction")
        if self.kind == "orthographic" and self.ortho_width <= 0:
            raise BadParameter("ortho_width must be positive")
        if self.kind == "perspective" and not (0 < self.fov_y < np.pi):
            raise BadParameter("fov_y must lie in (0, pi)")

    def basis(self):
        """Right-handed (right, up, forward) orthonormal basis."""
        f = _normalize(np.asarray(self.look_at, float) - np.asarray(self.eye, float))
        r = _normalize(np.cross(f, _normalize(self.up)))
        u = np.cross(r, f)
        return r, u, f

    def rays(self):
        """Per-pixel ray origins and unit directions, shape (h, w, 3) each."""
        r, u, f = self.basis()
        eye = np.asarray(self.eye, dtype=np.float64)
        w, h = self.width, self.height
        px = np.arange(w, dtype=np.float64) + 0.5
        py = np.arange(h, dtype=np.float64) + 0.5
        if self.kind == "orthographic":
            pitch = self.ortho_width / w
            x = (px - w / 2.0) * pitch
            y = (h / 2.0 - py) * pitch
            origins = (eye[None, None, :]
                       + x[None, :, None] * r[None, None, :]
                       + y[:, None, None] * u[None, None, :])
            dirs = np.broadcast_to(f, (h, w, 3)).copy()
        else:
            half_h = np.tan(self.fov_y / 2.0)
            x = (px - w / 2.0) / (h / 2.0) * half_h
            y = (h / 2.0 - py) / (h / 2.0) * half_h
            d = (f[None, None, :]
                 + x[None, :, None] * r[None, None, :]
                 + y[:, None, None] * u[None, None, :])
            dirs = d / np.linalg.norm(d, axis=2, keepdims=True)
            origins = np.broadcast_to(eye, (h, w, 3)).copy()
        return np.ascontiguousarray(origins), np.ascontiguousarray(dirs)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "eye": [float(c) for c in self.eye],
            "look_at": [float(c) for c in self.look_at],
            "up": [float(c) for c in self.up],
            "width": self.width,
            "height": self.height,
            "ortho_width": float(self.ortho_width),
            "fov_y": float(self.fov_y),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Camera":
        try:
            return cls(
                kind=doc["kind"],
                eye=tuple(doc["eye"]),
                look_at=tuple(doc["look_at"]),
                up=tuple(doc.get("up", (0.0, 0.0, 1.0))),
                width=int(doc.get("width", 512)),
                height=int(doc.get("height", 512)),
                ortho_width=float(doc.get("ortho_width", 300.0)),
                fov_y=float(doc.get("fov_y", 0.9)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise BadParameter(f"bad camera document: {exc}") from exc

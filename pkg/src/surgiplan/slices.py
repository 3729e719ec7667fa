"""Planar and oblique slice extraction."""
from __future__ import annotations

import numpy as np

from .errors import BadParameter, DegenerateNormal, IndexOutOfRange
from .image import Image
from .transfer import ValueWindow, apply_window
from .volume import Volume, sample

PLANES = ("axial", "coronal", "sagittal")


def _to_gray(values: np.ndarray, w: ValueWindow) -> np.ndarray:
    return np.floor(255.0 * apply_window(values, w) + 0.5).astype(np.uint8)


def extract_slice(v: Volume, plane: str, index: int, w: ValueWindow) -> Image:
    """Extract an axis-aligned slice as a windowed grayscale image.

    Axial images are (nx, ny), coronal (nx, nz), sagittal (ny, nz); pixel
    (u, v) follows ascending voxel indices with v along the second axis.
    """
    nx, ny, nz = v.sizes
    grid = v.grid()
    if plane == "axial":
        if not 0 <= index < nz:
            raise IndexOutOfRange(f"axial index {index} outside [0, {nz})")
        values = grid[index]                  # (ny, nx)
    elif plane == "coronal":
        if not 0 <= index < ny:
            raise IndexOutOfRange(f"coronal index {index} outside [0, {ny})")
        values = grid[:, index, :]            # (nz, nx)
    elif plane == "sagittal":
        if not 0 <= index < nx:
            raise IndexOutOfRange(f"sagittal index {index} outside [0, {nx})")
        values = grid[:, :, index]            # (nz, ny)
    else:
        raise BadParameter(f"unknown plane {plane!r}")
    return Image.from_gray(_to_gray(np.asarray(values), w))


def plane_axis_extent(v: Volume, plane: str) -> int:
    """Number of valid slice indices for a plane."""
    nx, ny, nz = v.sizes
    return {"axial": nz, "coronal": ny, "sagittal": nx}[plane]


def oblique_axes(normal) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic in-plane axes for a cross-section plane.

    First axis is the normalized projection of world +x onto the plane,
    falling back to +y when the normal is within 1e-6 of +-x.
    """
    n = np.asarray(normal, dtype=float)
    norm = np.linalg.norm(n)
    if norm < 1e-12:
        raise DegenerateNormal("plane normal must be nonzero")
    n = n / norm
    seed = np.array([1.0, 0.0, 0.0])
    if np.linalg.norm(np.cross(n, seed)) < 1e-6:
        seed = np.array([0.0, 1.0, 0.0])
    a1 = seed - np.dot(seed, n) * n
    a1 /= np.linalg.norm(a1)
    a2 = np.cross(n, a1)
    return a1, a2


def extract_oblique_slice(v: Volume, point, normal, extent: float,
                          resolution: int, w: ValueWindow,
                          sampling: str = "trilinear") -> Image:
    """Sample a square patch centered at `point` in the plane normal to `normal`."""
    if extent <= 0:
        raise BadParameter(f"extent must be positive, got {extent}")
    if resolution < 1:
        raise BadParameter(f"resolution must be >= 1, got {resolution}")
    a1, a2 = oblique_axes(normal)
    point = np.asarray(point, dtype=float)
    # out-of-volume samples fall back to the window floor -> gray 0
    background = w.lo
    coords = (np.arange(resolution, dtype=float) + 0.5) / resolution - 0.5
    values = np.empty((resolution, resolution), dtype=np.float64)
    for vi in range(resolution):
        for ui in range(resolution):
            p = point + coords[ui] * extent * a1 + coords[vi] * extent * a2
            values[vi, ui] = sample(v, p, mode=sampling, background=background)
    return Image.from_gray(_to_gray(values, w))

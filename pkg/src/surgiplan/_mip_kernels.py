"""MIP ray-marching kernels.

Two interchangeable implementations: a numba ``@njit`` scalar loop
(parallel over image rows) and a vectorized pure-numpy fallback. Both
evaluate the same expressions in the same association order so their
outputs are bit-identical; the backend is chosen in :mod:`surgiplan.backend`.

Inputs are pre-lowered to arrays: the voxel grid as float32 ``[k, j, i]``,
the world->index affine as a 3x3 matrix plus offset, per-pixel ray origins
and unit directions, and flattened clip parameters.
"""
from __future__ import annotations

import numpy as np

from .backend import NUMBA_ENABLED

_HUGE = 1e30


def _mip_march_numpy(grid, m, b, origins, dirs, step, lo, hi,
                     use_box, box_min, box_max, use_plane, plane_p, plane_n,
                     nearest):
    nz, ny, nx = grid.shape
    h, w = origins.shape[:2]
    o = origins.reshape(-1, 3)
    d = dirs.reshape(-1, 3)

    iox = m[0, 0] * o[:, 0] + m[0, 1] * o[:, 1] + m[0, 2] * o[:, 2] + b[0]
    ioy = m[1, 0] * o[:, 0] + m[1, 1] * o[:, 1] + m[1, 2] * o[:, 2] + b[1]
    ioz = m[2, 0] * o[:, 0] + m[2, 1] * o[:, 1] + m[2, 2] * o[:, 2] + b[2]
    ivx = m[0, 0] * d[:, 0] + m[0, 1] * d[:, 1] + m[0, 2] * d[:, 2]
    ivy = m[1, 0] * d[:, 0] + m[1, 1] * d[:, 1] + m[1, 2] * d[:, 2]
    ivz = m[2, 0] * d[:, 0] + m[2, 1] * d[:, 1] + m[2, 2] * d[:, 2]

    tmin = np.zeros(o.shape[0])
    tmax = np.full(o.shape[0], _HUGE)
    for io, iv, n in ((iox, ivx, nx), (ioy, ivy, ny), (ioz, ivz, nz)):
        lo_b, hi_b = -0.5, n - 0.5
        par = np.abs(iv) < 1e-15
        with np.errstate(divide="ignore", invalid="ignore"):
            t0 = (lo_b - io) / iv
            t1 = (hi_b - io) / iv
        near = np.where(par, -_HUGE, np.minimum(t0, t1))
        far = np.where(par, _HUGE, np.maximum(t0, t1))
        # parallel ray outside the slab never enters
        far = np.where(par & ((io < lo_b) | (io > hi_b)), -_HUGE, far)
        tmin = np.maximum(tmin, near)
        tmax = np.minimum(tmax, far)

    best = np.full(o.shape[0], -_HUGE)
    hit = np.zeros(o.shape[0], dtype=np.bool_)
    span = tmax - (tmin + 0.5 * step)
    n_steps = int(np.floor(np.max(span, initial=-1.0) / step)) + 1
    for s in range(max(n_steps, 0)):
        t = tmin + 0.5 * step + s * step
        active = t < tmax
        if not active.any():
            break
        px = iox + t * ivx
        py = ioy + t * ivy
        pz = ioz + t * ivz
        inside = (active
                  & (px >= 0.0) & (px <= nx - 1)
                  & (py >= 0.0) & (py <= ny - 1)
                  & (pz >= 0.0) & (pz <= nz - 1))
        if use_box or use_plane:
            wx = o[:, 0] + t * d[:, 0]
            wy = o[:, 1] + t * d[:, 1]
            wz = o[:, 2] + t * d[:, 2]
        if use_box:
            in_box = ((wx > box_min[0]) & (wx < box_max[0])
                      & (wy > box_min[1]) & (wy < box_max[1])
                      & (wz > box_min[2]) & (wz < box_max[2]))
            inside &= ~in_box
        if use_plane:
            side = ((wx - plane_p[0]) * plane_n[0]
                    + (wy - plane_p[1]) * plane_n[1]
                    + (wz - plane_p[2]) * plane_n[2])
            inside &= side >= 0.0
        if not inside.any():
            continue
        if nearest:
            i = np.floor(px + 0.5).astype(np.int64)
            j = np.floor(py + 0.5).astype(np.int64)
            k = np.floor(pz + 0.5).astype(np.int64)
            np.clip(i, 0, nx - 1, out=i)
            np.clip(j, 0, ny - 1, out=j)
            np.clip(k, 0, nz - 1, out=k)
            val = grid[k, j, i].astype(np.float64)
        else:
            i0 = np.clip(np.floor(px).astype(np.int64), 0, max(nx - 2, 0))
            j0 = np.clip(np.floor(py).astype(np.int64), 0, max(ny - 2, 0))
            k0 = np.clip(np.floor(pz).astype(np.int64), 0, max(nz - 2, 0))
            i1 = np.minimum(i0 + 1, nx - 1)
            j1 = np.minimum(j0 + 1, ny - 1)
            k1 = np.minimum(k0 + 1, nz - 1)
            fx = px - i0
            fy = py - j0
            fz = pz - k0
            c00 = grid[k0, j0, i0] * (1.0 - fx) + grid[k0, j0, i1] * fx
            c10 = grid[k0, j1, i0] * (1.0 - fx) + grid[k0, j1, i1] * fx
            c01 = grid[k1, j0, i0] * (1.0 - fx) + grid[k1, j0, i1] * fx
            c11 = grid[k1, j1, i0] * (1.0 - fx) + grid[k1, j1, i1] * fx
            c0 = c00 * (1.0 - fy) + c10 * fy
            c1 = c01 * (1.0 - fy) + c11 * fy
            val = c0 * (1.0 - fz) + c1 * fz
        keep = inside & (val >= lo) & (val <= hi)
        better = keep & (val > best)
        best = np.where(better, val, best)
        hit |= keep
    return best.reshape(h, w), hit.reshape(h, w)


def _make_numba_kernel():
    from numba import njit, prange

    @njit(parallel=True, cache=True)
    def _mip_march_numba(grid, m, b, origins, dirs, step, lo, hi,
                         use_box, box_min, box_max, use_plane, plane_p,
                         plane_n, nearest):  # pragma: no cover - jitted
        nz, ny, nx = grid.shape
        h, w = origins.shape[0], origins.shape[1]
        best = np.full((h, w), -_HUGE)
        hit = np.zeros((h, w), dtype=np.bool_)
        for row in prange(h):
            for col in range(w):
                ox = origins[row, col, 0]
                oy = origins[row, col, 1]
                oz = origins[row, col, 2]
                dx = dirs[row, col, 0]
                dy = dirs[row, col, 1]
                dz = dirs[row, col, 2]
                iox = m[0, 0] * ox + m[0, 1] * oy + m[0, 2] * oz + b[0]
                ioy = m[1, 0] * ox + m[1, 1] * oy + m[1, 2] * oz + b[1]
                ioz = m[2, 0] * ox + m[2, 1] * oy + m[2, 2] * oz + b[2]
                ivx = m[0, 0] * dx + m[0, 1] * dy + m[0, 2] * dz
                ivy = m[1, 0] * dx + m[1, 1] * dy + m[1, 2] * dz
                ivz = m[2, 0] * dx + m[2, 1] * dy + m[2, 2] * dz

                tmin = 0.0
                tmax = _HUGE
                for axis in range(3):
                    if axis == 0:
                        io, iv, n = iox, ivx, nx
                    elif axis == 1:
                        io, iv, n = ioy, ivy, ny
                    else:
                        io, iv, n = ioz, ivz, nz
                    lo_b = -0.5
                    hi_b = n - 0.5
                    if abs(iv) < 1e-15:
                        if io < lo_b or io > hi_b:
                            tmax = -_HUGE
                    else:
                        t0 = (lo_b - io) / iv
                        t1 = (hi_b - io) / iv
                        near = min(t0, t1)
                        far = max(t0, t1)
                        if near > tmin:
                            tmin = near
                        if far < tmax:
                            tmax = far
                if tmax <= tmin:
                    continue
                n_steps = int(np.floor((tmax - (tmin + 0.5 * step)) / step)) + 1
                for s in range(n_steps):
                    t = tmin + 0.5 * step + s * step
                    if t >= tmax:
                        break
                    px = iox + t * ivx
                    py = ioy + t * ivy
                    pz = ioz + t * ivz
                    if (px < 0.0 or px > nx - 1 or py < 0.0 or py > ny - 1
                            or pz < 0.0 or pz > nz - 1):
                        continue
                    if use_box or use_plane:
                        wx = ox + t * dx
                        wy = oy + t * dy
                        wz = oz + t * dz
                    if use_box:
                        if (wx > box_min[0] and wx < box_max[0]
                                and wy > box_min[1] and wy < box_max[1]
                                and wz > box_min[2] and wz < box_max[2]):
                            continue
                    if use_plane:
                        side = ((wx - plane_p[0]) * plane_n[0]
                                + (wy - plane_p[1]) * plane_n[1]
                                + (wz - plane_p[2]) * plane_n[2])
                        if side < 0.0:
                            continue
                    if nearest:
                        i = int(np.floor(px + 0.5))
                        j = int(np.floor(py + 0.5))
                        k = int(np.floor(pz + 0.5))
                        if i > nx - 1:
                            i = nx - 1
                        if j > ny - 1:
                            j = ny - 1
                        if k > nz - 1:
                            k = nz - 1
                        val = np.float64(grid[k, j, i])
                    else:
                        i0 = int(np.floor(px))
                        j0 = int(np.floor(py))
                        k0 = int(np.floor(pz))
                        if i0 > nx - 2:
                            i0 = max(nx - 2, 0)
                        if j0 > ny - 2:
                            j0 = max(ny - 2, 0)
                        if k0 > nz - 2:
                            k0 = max(nz - 2, 0)
                        i1 = min(i0 + 1, nx - 1)
                        j1 = min(j0 + 1, ny - 1)
                        k1 = min(k0 + 1, nz - 1)
                        fx = px - i0
                        fy = py - j0
                        fz = pz - k0
                        c00 = grid[k0, j0, i0] * (1.0 - fx) + grid[k0, j0, i1] * fx
                        c10 = grid[k0, j1, i0] * (1.0 - fx) + grid[k0, j1, i1] * fx
                        c01 = grid[k1, j0, i0] * (1.0 - fx) + grid[k1, j0, i1] * fx
                        c11 = grid[k1, j1, i0] * (1.0 - fx) + grid[k1, j1, i1] * fx
                        c0 = c00 * (1.0 - fy) + c10 * fy
                        c1 = c01 * (1.0 - fy) + c11 * fy
                        val = c0 * (1.0 - fz) + c1 * fz
                    if val < lo or val > hi:
                        continue
                    if val > best[row, col]:
                        best[row, col] = val
                    hit[row, col] = True
        return best, hit

    return _mip_march_numba


if NUMBA_ENABLED:
    mip_march = _make_numba_kernel()
else:
    mip_march = _mip_march_numpy

"""Benchmark the MIP ray-march kernels: numba @njit vs pure numpy.

Usage:
    python3 benchmarks/bench_mip.py [--size 128] [--image 256] [--repeat 3]

Runs the same workload through both kernels, verifies the outputs are
bit-identical, and prints per-backend timings. Set SURGIPLAN_BACKEND=numpy
before importing to disable the numba path entirely.
"""
import argparse
import time

import numpy as np

from surgiplan import Camera, ValueWindow, Volume, VolumeHeader
from surgiplan.backend import NUMBA_ENABLED, backend_name
from surgiplan.volume import min_voxel_pitch
from surgiplan._mip_kernels import _mip_march_numpy, mip_march


def build_volume(size: int) -> Volume:
    rng = np.random.default_rng(0)
    header = VolumeHeader(sizes=(size, size, size), scalar_kind="uint8")
    voxels = rng.integers(0, 255, size ** 3).astype(np.uint8)
    return Volume(header, voxels)


def kernel_args(volume: Volume, image: int):
    nx, ny, nz = volume.sizes
    center = ((nx - 1) / 2.0, (ny - 1) / 2.0, (nz - 1) / 2.0)
    cam = Camera(kind="orthographic",
                 eye=(center[0], center[1], center[2] + 4.0 * nz),
                 look_at=center, up=(0.0, 1.0, 0.0),
                 width=image, height=image, ortho_width=float(nx))
    origins, dirs = cam.rays()
    grid = volume.grid().astype(np.float32)
    m = np.ascontiguousarray(volume.map.inverse[:3, :3])
    b = np.ascontiguousarray(volume.map.inverse[:3, 3])
    zeros = np.zeros(3)
    step = min_voxel_pitch(volume)
    return (grid, m, b, origins, dirs, step, 0.0, 255.0,
            False, zeros, zeros, False, zeros, zeros, False)


def timed(fn, args, repeat: int) -> float:
    best = np.inf
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=128,
                        help="volume edge length in voxels")
    parser.add_argument("--image", type=int, default=256,
                        help="square image edge length in pixels")
    parser.add_argument("--repeat", type=int, default=3,
                        help="repetitions per backend; best time wins")
    opts = parser.parse_args()

    volume = build_volume(opts.size)
    args = kernel_args(volume, opts.image)
    rays = opts.image * opts.image

    print(f"volume {opts.size}^3 uint8, image {opts.image}x{opts.image}, "
          f"active backend: {backend_name()}")

    t_numpy = timed(_mip_march_numpy, args, opts.repeat)
    print(f"numpy : {t_numpy * 1000:8.1f} ms  "
          f"({rays / t_numpy / 1e6:.2f} Mrays/s)")

    if not NUMBA_ENABLED:
        print("numba : unavailable (SURGIPLAN_BACKEND=numpy or not installed)")
        return 0

    mip_march(*args)  # compile before timing
    t_numba = timed(mip_march, args, opts.repeat)
    print(f"numba : {t_numba * 1000:8.1f} ms  "
          f"({rays / t_numba / 1e6:.2f} Mrays/s)  "
          f"speedup x{t_numpy / t_numba:.1f}")

    best_np, hit_np = _mip_march_numpy(*args)
    best_nb, hit_nb = mip_march(*args)
    identical = (np.array_equal(hit_np, hit_nb)
                 and np.array_equal(best_np[hit_np], best_nb[hit_nb]))
    print(f"outputs bit-identical: {identical}")
    return 0 if identical else 1


if __name__ == "__main__":
    raise SystemExit(main())

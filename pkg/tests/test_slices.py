import numpy as np
import pytest

from surgiplan import ValueWindow, extract_oblique_slice, extract_slice, voxel_at
from surgiplan.errors import BadParameter, DegenerateNormal, IndexOutOfRange

from conftest import make_volume


def window_gray(value, lo, hi):
    # independent oracle for the slice pixel formula
    t = min(max((value - lo) / (hi - lo), 0.0), 1.0)
    return int(np.floor(255.0 * t + 0.5))


def test_axial_slice_fixture(tiny_volume):
    img = extract_slice(tiny_volume, "axial", 0, ValueWindow(0, 7))
    assert (img.width, img.height) == (2, 2)
    assert list(img.pixels[..., 0].ravel()) == [0, 36, 73, 109]
    assert (img.pixels[..., 3] == 255).all()


def test_axial_index_out_of_range(tiny_volume):
    with pytest.raises(IndexOutOfRange):
        extract_slice(tiny_volume, "axial", 2, ValueWindow(0, 7))


def test_coronal_dims():
    v = make_volume(sizes=(4, 2, 3))
    img = extract_slice(v, "coronal", 0, ValueWindow(0, 100))
    assert (img.width, img.height) == (4, 3)


def test_sagittal_dims():
    v = make_volume(sizes=(4, 2, 3))
    img = extract_slice(v, "sagittal", 1, ValueWindow(0, 100))
    assert (img.width, img.height) == (2, 3)


def test_unknown_plane(tiny_volume):
    with pytest.raises(BadParameter):
        extract_slice(tiny_volume, "oblique", 0, ValueWindow(0, 7))


def test_all_slices_match_voxel_oracle():
    rng = np.random.default_rng(9)
    v = make_volume(sizes=(5, 4, 3), kind="int16",
                    values=rng.integers(-100, 100, 60).astype(np.int16))
    lo, hi = -80.0, 90.0
    w = ValueWindow(lo, hi)
    nx, ny, nz = v.sizes
    for k in range(nz):
        img = extract_slice(v, "axial", k, w)
        for j in range(ny):
            for i in range(nx):
                assert img.pixels[j, i, 0] == window_gray(voxel_at(v, i, j, k), lo, hi)
    for j in range(ny):
        img = extract_slice(v, "coronal", j, w)
        for k in range(nz):
            for i in range(nx):
                assert img.pixels[k, i, 0] == window_gray(voxel_at(v, i, j, k), lo, hi)
    for i in range(nx):
        img = extract_slice(v, "sagittal", i, w)
        for k in range(nz):
            for j in range(ny):
                assert img.pixels[k, j, 0] == window_gray(voxel_at(v, i, j, k), lo, hi)


def test_oblique_matches_axial():
    rng = np.random.default_rng(2)
    v = make_volume(sizes=(6, 6, 6), kind="uint8",
                    values=rng.integers(0, 255, 216).astype(np.uint8))
    w = ValueWindow(0, 255)
    k = 3
    center = v.map.index_to_world((2.5, 2.5, float(k)))
    img = extract_oblique_slice(v, center, (0, 0, 1), extent=6.0, resolution=6,
                                w=w, sampling="nearest")
    ref = extract_slice(v, "axial", k, w)
    assert np.array_equal(img.pixels[..., 0], ref.pixels[..., 0])


def test_oblique_degenerate_normal(tiny_volume):
    with pytest.raises(DegenerateNormal):
        extract_oblique_slice(tiny_volume, (0, 0, 0), (0, 0, 0), 1.0, 2,
                              ValueWindow(0, 7))


def test_oblique_outside_volume_is_background(tiny_volume):
    img = extract_oblique_slice(tiny_volume, (500.0, 500.0, 500.0), (0, 0, 1),
                                extent=4.0, resolution=4, w=ValueWindow(0, 7))
    assert (img.pixels[..., 0] == 0).all()


def test_oblique_x_normal_fallback_axis(tiny_volume):
    # normal along +-x switches the first in-plane axis to +y
    img = extract_oblique_slice(tiny_volume, (0.5, 0.5, 0.5), (1, 0, 0),
                                extent=2.0, resolution=2, w=ValueWindow(0, 7))
    assert (img.width, img.height) == (2, 2)

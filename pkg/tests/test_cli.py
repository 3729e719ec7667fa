import json

import numpy as np
import pytest

from surgiplan import (
    ValueWindow,
    extract_slice,
    render_mip,
    save_scene,
    write_nrrd,
)
from surgiplan.cli import _auto_camera, main
from surgiplan.robot_config import default_registry
from surgiplan.scene import RobotPlacement, Scene

from conftest import make_volume


@pytest.fixture
def volume():
    rng = np.random.default_rng(30)
    return make_volume(sizes=(5, 4, 3), kind="uint8",
                       values=rng.integers(0, 255, 60).astype(np.uint8))


@pytest.fixture
def volume_path(tmp_path, volume):
    path = tmp_path / "fixture.nrrd"
    path.write_bytes(write_nrrd(volume))
    return str(path)


@pytest.fixture
def scene_path(tmp_path):
    registry = default_registry()
    scene = Scene()
    scene.add_robot(RobotPlacement(id="instrument", model_name="spherical",
                                   model=registry["spherical"]))
    scene.trocars["port-a"] = np.array([100.0, 50.0, 200.0])
    scene.targets["lesion"] = np.array([100.0, 50.0, 120.0])
    path = tmp_path / "scene.json"
    path.write_bytes(save_scene(scene))
    return str(path)


def test_info(volume_path, volume, capsys):
    assert main(["info", "--volume", volume_path]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["sizes"] == [5, 4, 3]
    assert doc["type"] == "uint8"
    lo, hi = volume.value_range()
    assert doc["value_range"] == [lo, hi]


def test_info_missing_file(tmp_path, capsys):
    assert main(["info", "--volume", str(tmp_path / "nope.nrrd")]) == 1
    assert "FileNotFound" in capsys.readouterr().err


def test_slice_writes_png(volume_path, volume, tmp_path, capsys):
    out = tmp_path / "slice.png"
    code = main(["slice", "--volume", volume_path, "--plane", "axial",
                 "--index", "1", "--lo", "0", "--hi", "255",
                 "--out", str(out)])
    assert code == 0
    expected = extract_slice(volume, "axial", 1, ValueWindow(0, 255))
    assert out.read_bytes() == expected.to_png()
    doc = json.loads(capsys.readouterr().out)
    assert (doc["width"], doc["height"]) == (5, 4)


def test_slice_out_of_range_exits_2(volume_path, tmp_path, capsys):
    code = main(["slice", "--volume", volume_path, "--plane", "axial",
                 "--index", "9", "--lo", "0", "--hi", "255",
                 "--out", str(tmp_path / "x.png")])
    assert code == 2
    assert "IndexOutOfRange" in capsys.readouterr().err


def test_render_matches_engine(volume_path, volume, tmp_path):
    out = tmp_path / "mip.png"
    code = main(["render", "--volume", volume_path, "--lo", "0", "--hi", "255",
                 "--width", "32", "--height", "32", "--out", str(out)])
    assert code == 0
    cam = _auto_camera(volume, 32, 32)
    expected = render_mip(volume, cam, ValueWindow(0, 255))
    assert out.read_bytes() == expected.to_png()


def test_render_bad_window_exits_2(volume_path, tmp_path, capsys):
    code = main(["render", "--volume", volume_path, "--lo", "10", "--hi", "10",
                 "--out", str(tmp_path / "x.png")])
    assert code == 2
    assert "BadRange" in capsys.readouterr().err


def test_reach(scene_path, capsys):
    code = main(["reach", "--scene", scene_path, "--robot-id", "instrument",
                 "--trocar", "port-a", "--target", "lesion"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["feasible"] is True
    assert doc["rcm_residual"] <= 1e-6


def test_simulate(scene_path, tmp_path, capsys):
    out = tmp_path / "traj.json"
    code = main(["simulate", "--scene", scene_path, "--robot-id", "instrument",
                 "--trocar", "port-a", "--target", "lesion",
                 "--steps", "5", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert len(doc["samples"]) == 5
    summary = json.loads(capsys.readouterr().out)
    assert summary["samples"] == 5


def test_usage_error_exits_1(capsys):
    with pytest.raises(SystemExit) as info:
        main(["slice", "--volume", "x.nrrd"])  # missing required flags
    assert info.value.code == 1
    assert "error" in capsys.readouterr().err


def test_unknown_verb_exits_1(capsys):
    with pytest.raises(SystemExit) as info:
        main(["transmogrify"])
    assert info.value.code == 1

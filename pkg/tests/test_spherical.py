import numpy as np
import pytest

from surgiplan import (
    SphericalRcmModel,
    counterweight_balance,
    rcm_residual,
    spherical_fk,
    spherical_ik,
)
from surgiplan.errors import (
    BadLeverArm,
    BadParameter,
    DegenerateTarget,
    LimitViolation,
)
from surgiplan.spherical_arm import instrument_capsule

RCM = np.array([100.0, 50.0, 200.0])


def test_fk_zero_joints_points_down():
    model = SphericalRcmModel()
    axis, tip, frames = spherical_fk(model, [0.0, 0.0, model.instrument_offset],
                                     RCM)
    assert np.allclose(axis, (0.0, 0.0, -1.0))
    # insertion equal to the instrument offset puts the tip at the RCM
    assert np.allclose(tip, RCM, atol=1e-12)
    assert np.allclose(frames["rcm"], RCM)


def test_fk_quarter_tilt():
    model = SphericalRcmModel()
    d_arc = model.arc_radius * np.pi / 4  # phi = 45 degrees toward +x
    axis, tip, _ = spherical_fk(model, [0.0, d_arc, 180.0], RCM)
    s = np.sqrt(0.5)
    assert np.allclose(axis, (s, 0.0, -s), atol=1e-12)
    assert np.allclose(tip, RCM + 80.0 * np.array([s, 0.0, -s]), atol=1e-9)


def test_fk_azimuth_rotates_tilt_plane():
    model = SphericalRcmModel()
    d_arc = model.arc_radius * np.pi / 6
    axis, _, _ = spherical_fk(model, [np.pi / 2, d_arc, 150.0], RCM)
    assert np.allclose(axis, (0.0, 0.5, -np.sqrt(3) / 2), atol=1e-12)


def test_axis_always_passes_through_rcm():
    model = SphericalRcmModel()
    rng = np.random.default_rng(0)
    for _ in range(10000):
        q = model.random_q(rng)
        axis, tip, _ = spherical_fk(model, q, RCM)
        assert abs(np.linalg.norm(axis) - 1.0) < 1e-12
        assert rcm_residual(tip, axis, RCM) <= 1e-9


def test_ik_fk_round_trip():
    model = SphericalRcmModel()
    rng = np.random.default_rng(1)
    for _ in range(1000):
        q_true = np.array([
            rng.uniform(-np.pi + 0.01, np.pi - 0.01),
            rng.uniform(1.0, model.arc_limits[1]),
            rng.uniform(model.instrument_offset + 1.0,
                        model.insertion_limits[1]),
        ])
        _, tip, _ = spherical_fk(model, q_true, RCM)
        q = spherical_ik(model, RCM, tip)
        assert np.abs(q - q_true).max() < 1e-6
        _, tip2, _ = spherical_fk(model, q, RCM)
        assert np.linalg.norm(tip2 - tip) < 1e-6


def test_ik_vertical_target_zero_azimuth():
    model = SphericalRcmModel()
    q = spherical_ik(model, RCM, RCM + (0.0, 0.0, -60.0))
    assert q[0] == 0.0
    assert abs(q[1]) < 1e-9
    assert abs(q[2] - 160.0) < 1e-9


def test_ik_limit_violation_names_arc_joint():
    model = SphericalRcmModel()
    # nearly horizontal target: tilt above the 75 degree arc limit
    with pytest.raises(LimitViolation) as info:
        spherical_ik(model, RCM, RCM + (100.0, 0.0, -10.0))
    assert info.value.joint == "d_arc"
    assert info.value.amount > 0


def test_ik_limit_violation_names_insertion_joint():
    model = SphericalRcmModel()
    with pytest.raises(LimitViolation) as info:
        spherical_ik(model, RCM, RCM + (0.0, 0.0, -200.0))
    assert info.value.joint == "d_ins"


def test_ik_degenerate_target():
    with pytest.raises(DegenerateTarget):
        spherical_ik(SphericalRcmModel(), RCM, RCM)


def test_fk_clamped_rejects_out_of_limit():
    model = SphericalRcmModel()
    with pytest.raises(LimitViolation) as info:
        spherical_fk(model, [0.0, -5.0, 100.0], RCM)
    assert info.value.joint == "d_arc"
    assert info.value.amount == -5.0
    # unclamped mode evaluates anyway
    axis, _, _ = spherical_fk(model, [0.0, -5.0, 100.0], RCM, clamped=False)
    assert np.isfinite(axis).all()


def test_fk_wrong_joint_count():
    with pytest.raises(BadParameter):
        spherical_fk(SphericalRcmModel(), [0.0, 0.0], RCM)


def test_model_validation():
    with pytest.raises(BadParameter):
        SphericalRcmModel(arc_radius=0.0)
    with pytest.raises(BadParameter):
        SphericalRcmModel(insertion_limits=(10.0, 10.0))
    with pytest.raises(BadParameter):
        SphericalRcmModel(reference_direction=(0.0, 0.0, -2.0))
    with pytest.raises(BadParameter):
        SphericalRcmModel(reference_direction=(1.0, 0.0, 0.0))


def test_rcm_residual_matches_sampling_oracle():
    rng = np.random.default_rng(2)
    for _ in range(100):
        p = rng.uniform(-100, 100, 3)
        d = rng.normal(size=3)
        d /= np.linalg.norm(d)
        point = rng.uniform(-100, 100, 3)
        exact = rcm_residual(p, d, point)
        ts = np.linspace(-500, 500, 100001)
        samples = p[None, :] + ts[:, None] * d[None, :]
        approx = float(np.linalg.norm(samples - point, axis=1).min())
        assert abs(exact - approx) < 1e-4


def test_counterweight_fixture():
    assert counterweight_balance(1.0, 300.0, 150.0) == 2.0
    assert counterweight_balance(0.0, 300.0, 150.0) == 0.0


def test_counterweight_random_triples():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        m = rng.uniform(0.1, 20.0)
        r_load = rng.uniform(1.0, 500.0)
        r_cw = rng.uniform(1.0, 500.0)
        m_cw = counterweight_balance(m, r_load, r_cw)
        # moments must balance to relative 1e-12
        assert abs(m_cw * r_cw - m * r_load) <= 1e-12 * m * r_load


def test_counterweight_bad_lever():
    with pytest.raises(BadLeverArm):
        counterweight_balance(1.0, 300.0, 0.0)
    with pytest.raises(BadParameter):
        counterweight_balance(-1.0, 300.0, 150.0)


def test_instrument_capsule_contains_tip():
    model = SphericalRcmModel()
    q = [0.3, 40.0, 180.0]
    p0, p1, radius = instrument_capsule(model, q, RCM)
    axis, tip, frames = spherical_fk(model, q, RCM)
    assert radius == model.shaft_radius
    assert np.allclose(p1, tip)
    assert np.allclose(p0, frames["carriage"])
    # the shaft segment passes through the RCM point
    assert rcm_residual(p0, axis, RCM) < 1e-9

import numpy as np
import pytest

from surgiplan import DHJoint, SerialRobotModel, default_registry, fk_dh, ik_dls
from surgiplan.errors import BadParameter, LengthMismatch, NotConverged
from surgiplan.pose import Pose
from surgiplan.serial_arm import interpolate_joint, jacobian_fd


def planar_2r(l1=1000.0, l2=1000.0):
    joints = [
        DHJoint(a=l1, alpha=0.0, d=0.0, limits=(-np.pi, np.pi)),
        DHJoint(a=l2, alpha=0.0, d=0.0, limits=(-np.pi, np.pi)),
    ]
    return SerialRobotModel("planar2r", joints)


def test_planar_jacobian_stretched():
    # q = (0, 0): both links along +x, tip at (2000, 0, 0)
    model = planar_2r()
    jac = jacobian_fd(model, [0.0, 0.0])
    assert np.allclose(jac[:3, 0], (0.0, 2000.0, 0.0), atol=1e-3)
    assert np.allclose(jac[:3, 1], (0.0, 1000.0, 0.0), atol=1e-3)
    assert np.allclose(jac[3:, 0], (0.0, 0.0, 1.0), atol=1e-6)
    assert np.allclose(jac[3:, 1], (0.0, 0.0, 1.0), atol=1e-6)


def test_planar_jacobian_elbow_bent():
    # q = (0, pi/2): second link along +y, tip at (1000, 1000, 0)
    model = planar_2r()
    jac = jacobian_fd(model, [0.0, np.pi / 2])
    assert np.allclose(jac[:3, 0], (-1000.0, 1000.0, 0.0), atol=1e-3)
    assert np.allclose(jac[:3, 1], (-1000.0, 0.0, 0.0), atol=1e-3)


def test_jacobian_richardson_consistency():
    # halving epsilon changes a central difference by O(eps^2)
    model = default_registry()["ur5"]
    q = np.array([0.4, -0.9, 1.2, 0.3, -0.5, 0.8])
    j1 = jacobian_fd(model, q, epsilon=1e-4)
    j2 = jacobian_fd(model, q, epsilon=5e-5)
    assert np.abs(j1 - j2).max() < 1e-4


def test_jacobian_bad_epsilon():
    with pytest.raises(BadParameter):
        jacobian_fd(planar_2r(), [0.0, 0.0], epsilon=0.0)


def test_ik_round_trip_ur5():
    model = default_registry()["ur5"]
    rng = np.random.default_rng(1)
    solved = 0
    total = 100
    for _ in range(total):
        q_true = rng.uniform(-np.pi / 2, np.pi / 2, 6)
        target, _ = fk_dh(model, q_true)
        seed = q_true + rng.uniform(-0.3, 0.3, 6)
        try:
            q, _ = ik_dls(model, target, seed)
        except NotConverged:
            continue
        pose, _ = fk_dh(model, q)
        assert np.linalg.norm(pose.t - target.t) <= 1e-3
        solved += 1
    assert solved >= 95


def test_ik_exact_seed_zero_iterations():
    model = default_registry()["ur5"]
    q_true = np.array([0.1, -0.5, 0.8, 0.2, 0.3, -0.1])
    target, _ = fk_dh(model, q_true)
    q, iterations = ik_dls(model, target, q_true)
    assert iterations == 0
    assert np.array_equal(q, q_true)


def test_ik_unreachable_raises_not_converged():
    model = planar_2r()
    target = Pose(translation=np.array([5000.0, 0.0, 0.0]))  # beyond 2000 reach
    with pytest.raises(NotConverged) as info:
        ik_dls(model, target, [0.1, 0.1], max_iter=50)
    err = info.value
    assert err.best_q.shape == (2,)
    assert err.pos_residual >= 3000.0 - 1.0
    assert np.isfinite(err.rot_residual)


def test_ik_respects_limits():
    model = default_registry()["ur5"]
    rng = np.random.default_rng(5)
    q_true = rng.uniform(-np.pi / 2, np.pi / 2, 6)
    target, _ = fk_dh(model, q_true)
    q, _ = ik_dls(model, target, q_true + rng.uniform(-0.2, 0.2, 6))
    for joint, qi in zip(model.joints, q):
        assert joint.limits[0] <= qi <= joint.limits[1]


def test_ik_seed_length_mismatch():
    with pytest.raises(LengthMismatch):
        ik_dls(planar_2r(), Pose(), [0.0, 0.0, 0.0])


def test_interpolate_joint_endpoints():
    q0 = np.array([0.0, 1.0, -2.0])
    q1 = np.array([4.0, -1.0, 2.0])
    assert np.array_equal(interpolate_joint(q0, q1, 0.0), q0)
    assert np.array_equal(interpolate_joint(q0, q1, 1.0), q1)
    assert np.allclose(interpolate_joint(q0, q1, 0.5), (2.0, 0.0, 0.0))


def test_interpolate_joint_bad_s():
    with pytest.raises(BadParameter):
        interpolate_joint([0.0], [1.0], 1.5)


def test_interpolate_joint_length_mismatch():
    with pytest.raises(LengthMismatch):
        interpolate_joint([0.0], [1.0, 2.0], 0.5)

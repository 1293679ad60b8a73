import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.spatial.transform import Rotation

from rigidspin.exceptions import DegeneratePair, NotRotation, NotSkew, NotUnit, ZeroVector
from rigidspin.so3 import (
    check_rotation,
    exp_so3,
    hat,
    is_rotation,
    log_so3,
    log_so3_vec,
    matrix_to_quat,
    project_to_s2s2,
    quat_to_matrix,
    random_rotation,
    random_unit_vector,
    rotation_to_s2s2,
    s2s2_to_rotation,
    so3_right_difference_distance,
    vee,
)

from conftest import axis_angle_matrix

finite = st.floats(-100, 100, allow_nan=False, allow_infinity=False)
vec3 = arrays(np.float64, 3, elements=finite)


def test_hat_zero_and_basis():
    assert np.array_equal(hat(np.zeros(3)), np.zeros((3, 3)))
    assert np.array_equal(hat([0, 0, 1]), [[0, -1, 0], [1, 0, 0], [0, 0, 0]])


@given(vec3, vec3)
def test_hat_matches_componentwise_cross(v, y):
    expected = np.array([v[1] * y[2] - v[2] * y[1], v[2] * y[0] - v[0] * y[2], v[0] * y[1] - v[1] * y[0]])
    assert np.allclose(hat(v) @ y, expected, atol=1e-9)


def test_vee_round_trip_and_zero():
    assert np.array_equal(vee(np.zeros((3, 3))), np.zeros(3))
    assert np.array_equal(vee(hat([1.0, 2.0, 3.0])), [1.0, 2.0, 3.0])


def test_vee_rejects_non_skew():
    M = hat([1.0, 2.0, 3.0])
    M[0, 0] = 0.05  # ||M + M^T|| = 0.1
    with pytest.raises(NotSkew):
        vee(M)


def test_vee_is_batched():
    v = np.arange(12.0).reshape(4, 3)
    assert np.array_equal(vee(hat(v)), v)


def test_s2s2_orthonormal_inputs_give_identity():
    assert np.allclose(s2s2_to_rotation([1, 0, 0], [0, 1, 0]), np.eye(3))


def test_s2s2_removes_u_component():
    v = np.array([1.0, 1.0, 0.0]) / np.sqrt(2.0)
    assert np.allclose(s2s2_to_rotation([1, 0, 0], v), np.eye(3), atol=1e-15)


def test_s2s2_parallel_pair_rejected():
    v = np.array([1.0 + 1e-12, 0.0, 0.0])
    with pytest.raises(DegeneratePair):
        s2s2_to_rotation([1, 0, 0], v / np.linalg.norm(v))


def test_rotation_to_s2s2_identity_and_quarter_turn():
    p = rotation_to_s2s2(np.eye(3))
    assert np.array_equal(p.u, [1, 0, 0]) and np.array_equal(p.v, [0, 1, 0])
    p = rotation_to_s2s2(axis_angle_matrix([0, 0, 1], np.pi / 2))
    assert np.allclose(p.u, [0, 1, 0], atol=1e-15)
    assert np.allclose(p.v, [-1, 0, 0], atol=1e-15)


def test_s2s2_right_inverse_random(rng):
    for _ in range(1000):
        R = random_rotation(rng)
        p = rotation_to_s2s2(R)
        assert np.abs(s2s2_to_rotation(p.u, p.v) - R).max() <= 1e-9


@given(arrays(np.float64, 6, elements=st.floats(-10, 10)))
def test_s2s2_output_is_rotation(z):
    a, b = z[:3], z[3:]
    if min(np.linalg.norm(a), np.linalg.norm(b)) < 1e-3:
        return
    p = project_to_s2s2(z)
    if abs(p.u @ p.v) > 0.999:
        return
    assert is_rotation(s2s2_to_rotation(p.u, p.v))


def test_project_to_s2s2():
    p = project_to_s2s2([2, 0, 0, 0, 3, 0])
    assert np.array_equal(p.u, [1, 0, 0]) and np.array_equal(p.v, [0, 1, 0])
    with pytest.raises(ZeroVector):
        project_to_s2s2([1, 0, 0, 0, 0, 0])
    with pytest.raises(ValueError):
        project_to_s2s2(np.ones(5))


@given(arrays(np.float64, 6, elements=st.floats(-10, 10)))
def test_project_to_s2s2_unit(z):
    if min(np.linalg.norm(z[:3]), np.linalg.norm(z[3:])) <= 1e-6:
        return
    p = project_to_s2s2(z)
    assert abs(np.linalg.norm(p.u) - 1) < 1e-12 and abs(np.linalg.norm(p.v) - 1) < 1e-12


def test_quat_to_matrix_identity_and_z_rotation():
    assert np.allclose(quat_to_matrix([0, 0, 0, 1]), np.eye(3))
    th = 0.3
    q = [0, 0, np.sin(th / 2), np.cos(th / 2)]
    assert np.allclose(quat_to_matrix(q), axis_angle_matrix([0, 0, 1], th), atol=1e-15)


def test_quat_double_cover(rng):
    q = rng.standard_normal(4)
    q /= np.linalg.norm(q)
    assert np.array_equal(quat_to_matrix(q), quat_to_matrix(-q))


def test_quat_to_matrix_matches_scipy(rng):
    q = rng.standard_normal((200, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    assert np.allclose(quat_to_matrix(q), Rotation.from_quat(q).as_matrix(), atol=1e-14)


def test_quat_to_matrix_rejects_non_unit():
    with pytest.raises(NotUnit):
        quat_to_matrix([0, 0, 0, 1.1])


def test_matrix_to_quat_identity_and_half_turn():
    assert np.array_equal(matrix_to_quat(np.eye(3)), [0, 0, 0, 1])
    R = axis_angle_matrix([1, 0, 0], np.pi)
    q = matrix_to_quat(R)
    assert np.allclose(q, [1, 0, 0, 0], atol=1e-15) or np.allclose(q, [-1, 0, 0, 0], atol=1e-15)


def test_matrix_to_quat_round_trip(rng):
    Rs = np.array([random_rotation(rng) for _ in range(1000)])
    q = matrix_to_quat(Rs)
    assert np.all(q[:, 3] >= 0)
    assert np.abs(quat_to_matrix(q) - Rs).max() <= 1e-12


def test_matrix_to_quat_near_half_turns(rng):
    # trace close to -1 forces the diagonal branches
    for _ in range(200):
        axis = random_unit_vector(rng)
        R = axis_angle_matrix(axis, np.pi - 1e-9 * rng.random())
        assert np.abs(quat_to_matrix(matrix_to_quat(R)) - R).max() <= 1e-12


def test_matrix_to_quat_matches_scipy_up_to_sign(rng):
    Rs = np.array([random_rotation(rng) for _ in range(100)])
    ours = matrix_to_quat(Rs)
    ref = Rotation.from_matrix(Rs).as_quat()
    assert np.allclose(np.abs(np.sum(ours * ref, axis=1)), 1.0, atol=1e-12)


def test_exp_so3_known_values():
    assert np.array_equal(exp_so3(np.zeros(3)), np.eye(3))
    assert np.allclose(exp_so3([0, 0, np.pi / 2]), [[0, -1, 0], [1, 0, 0], [0, 0, 1]], atol=1e-15)


def test_exp_so3_matches_scipy(rng):
    v = rng.standard_normal((100, 3)) * 2
    assert np.allclose(exp_so3(v), Rotation.from_rotvec(v).as_matrix(), atol=1e-13)


def test_exp_so3_tiny_angle_is_rotation():
    R = exp_so3([1e-10, -2e-10, 3e-11])
    assert is_rotation(R, 1e-14)


def test_log_identity():
    aa = log_so3(np.eye(3))
    assert aa.angle == 0.0 and aa.branch == "zero-angle"
    assert np.array_equal(log_so3_vec(np.eye(3)), np.zeros(3))


def test_log_half_turn_about_y():
    aa = log_so3(exp_so3([0, np.pi, 0]))
    assert aa.branch == "pi-angle"
    assert abs(aa.angle - np.pi) < 1e-12
    assert np.allclose(np.abs(aa.axis), [0, 1, 0], atol=1e-12)


@settings(max_examples=300)
@given(arrays(np.float64, 3, elements=st.floats(-3, 3)))
def test_log_exp_round_trip(v):
    n = np.linalg.norm(v)
    if not 0.01 < n < 3.0:
        return
    assert np.allclose(log_so3_vec(exp_so3(v)), v, atol=1e-12)


def test_log_exp_round_trip_near_pi(rng):
    for _ in range(100):
        v = random_unit_vector(rng) * (np.pi - 1e-6 * rng.random() - 1e-6)
        assert np.allclose(log_so3_vec(exp_so3(v)), v, atol=1e-8)


def test_log_small_angles_exact():
    for n in (1e-11, 1e-9, 1e-6, 1e-3):
        v = n * np.array([0.6, -0.8, 0.0])
        assert np.allclose(log_so3_vec(exp_so3(v)), v, rtol=1e-9, atol=0)


def test_log_rejects_batches():
    with pytest.raises(ValueError):
        log_so3(np.stack([np.eye(3)] * 2))


def test_distance_values(rng):
    R = random_rotation(rng)
    assert so3_right_difference_distance(R, R) < 1e-28
    assert so3_right_difference_distance(np.eye(3), axis_angle_matrix([0, 0, 1], np.pi)) == pytest.approx(8.0)


def test_distance_left_invariant(rng):
    Ra, Rb = random_rotation(rng), random_rotation(rng)
    d = so3_right_difference_distance(Ra, Rb)
    for _ in range(100):
        Q = random_rotation(rng)
        assert so3_right_difference_distance(Q @ Ra, Q @ Rb) == pytest.approx(d, rel=1e-12)


def test_random_rotation_deterministic():
    a = random_rotation(np.random.default_rng(7))
    b = random_rotation(np.random.default_rng(7))
    assert np.array_equal(a, b)


def test_random_rotation_haar_mean():
    rng = np.random.default_rng(1)
    Rs = np.array([random_rotation(rng) for _ in range(10_000)])
    # each entry of a Haar rotation has mean 0 and variance 1/3
    sigma = np.sqrt(1 / 3 / len(Rs))
    assert np.all(np.abs(Rs.mean(axis=0)) < 5 * sigma)
    assert all(is_rotation(R) for R in Rs[:100])


def test_random_unit_vector_statistics():
    rng = np.random.default_rng(2)
    u = np.array([random_unit_vector(rng) for _ in range(10_000)])
    n = len(u)
    assert np.allclose(np.linalg.norm(u, axis=1), 1.0)
    assert np.all(np.abs(u.mean(axis=0)) < 5 * np.sqrt(1 / 3 / n))
    # var(x^2) = E[x^4] - 1/9 = 1/5 - 1/9 on the sphere
    assert np.all(np.abs((u ** 2).mean(axis=0) - 1 / 3) < 5 * np.sqrt((1 / 5 - 1 / 9) / n))


def test_check_rotation():
    check_rotation(np.eye(3))
    with pytest.raises(NotRotation):
        check_rotation(np.diag([1.0, 1.0, -1.0]))
    with pytest.raises(NotRotation):
        check_rotation(2 * np.eye(3))

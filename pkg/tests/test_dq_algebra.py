import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import random_pose
from dq_algebra import (
    SERIES_ANGLE, DualQuaternion, PureDualQuaternion, PureQuaternion, Quaternion,
    UnitDualQuaternion, UnitQuaternion, cross, exp_pure, hamilton_minus, inner, log_unit,
    pose_from, reproject, rotation_from_angle_axis, rotation_of, translation_of, vec3, vec6,
    vec6_inv, vec8, vec8_inv,
)
from error_metrics import decompose
from errors import ConstraintViolationError


def test_quaternion_units_multiply_as_hamilton():
    i = Quaternion(0, 1, 0, 0)
    j = Quaternion(0, 0, 1, 0)
    k = Quaternion(0, 0, 0, 1)
    assert i * j == k
    assert j * k == i
    assert k * i == j
    assert i * i == Quaternion(-1, 0, 0, 0)
    assert j * i == -k


def test_dual_unit_squares_to_zero():
    eps = DualQuaternion(Quaternion(), Quaternion(1, 0, 0, 0))
    assert_allclose((eps * eps).coeffs, np.zeros(8))


def test_random_identities(rng):
    for _ in range(10000):
        a = random_pose(rng)
        b = random_pose(rng)
        ab = a * b
        # norm multiplicativity and conjugate of a product
        assert abs(ab.norm() - a.norm() * b.norm()) < 1e-12
        assert_allclose(ab.conjugate().coeffs, (b.conjugate() * a.conjugate()).coeffs, atol=1e-12)
        # right-multiplication matrix
        assert_allclose(hamilton_minus(b) @ vec8(a), vec8(ab), atol=1e-12)


def test_unit_constraint_holds_for_poses(rng):
    for _ in range(200):
        d = decompose(random_pose(rng, scale=2.0))
        assert abs(d.unit_constraint()) < 1e-12
        assert abs(d.eta ** 2 + np.dot(d.mu.coeffs[1:], d.mu.coeffs[1:]) - 1.0) < 1e-12


def test_vec_round_trips(rng):
    v = rng.normal(size=6)
    assert_allclose(vec6(vec6_inv(v)), v)
    c = rng.normal(size=8)
    assert_allclose(vec8(vec8_inv(c)), c)


def test_vec3_rejects_non_pure():
    with pytest.raises(ConstraintViolationError):
        vec3(Quaternion(0.5, 1, 0, 0))


def test_vec6_rejects_non_pure():
    with pytest.raises(ConstraintViolationError):
        vec6(DualQuaternion(Quaternion(0, 1, 0, 0), Quaternion(0.1, 0, 0, 0)))


def test_cross_and_inner_of_pure_quaternions(rng):
    i, j, k = PureQuaternion(1, 0, 0), PureQuaternion(0, 1, 0), PureQuaternion(0, 0, 1)
    assert cross(i, j) == k
    assert cross(j, i) == -k
    assert inner(i, j) == 0.0
    for _ in range(200):
        u = PureQuaternion(*rng.normal(size=3))
        v = PureQuaternion(*rng.normal(size=3))
        # u v = -<u, v> + u x v for pure quaternions
        assert_allclose((u * v).coeffs, [-inner(u, v), *vec3(cross(u, v))], atol=1e-12)
        uu, vv = inner(u, u), inner(v, v)
        w = vec3(cross(u, v))
        assert abs(w @ w + inner(u, v) ** 2 - uu * vv) <= 1e-12 * max(1.0, uu * vv)
        assert abs(inner(cross(u, v), u)) < 1e-12


def test_rotation_axis_must_be_unit():
    with pytest.raises(ConstraintViolationError):
        rotation_from_angle_axis(1.0, PureQuaternion(1, 1, 0))


def test_unit_dual_quaternion_rejects_large_drift():
    with pytest.raises(ConstraintViolationError):
        UnitDualQuaternion.from_array([1.1, 0, 0, 0, 0, 0, 0, 0])


def test_small_drift_is_reprojected():
    x = UnitDualQuaternion.from_array([1.0 + 1e-8, 0, 0, 0, 0, 0.1, 0, 0])
    assert abs(np.linalg.norm(x.coeffs[:4]) - 1.0) < 1e-15


def test_reproject_restores_unit_constraint(rng):
    c = random_pose(rng).coeffs + 1e-3 * rng.normal(size=8)
    x = reproject(DualQuaternion.from_array(c))
    d = decompose(x)
    assert abs(np.linalg.norm(x.coeffs[:4]) - 1.0) < 1e-12
    assert abs(d.unit_constraint()) < 1e-12


def test_pose_translation_round_trip(rng):
    r = UnitQuaternion.normalized(rng.normal(size=4))
    p = PureQuaternion(*rng.normal(size=3))
    x = pose_from(r, p)
    assert_allclose(translation_of(x).coeffs, p.coeffs, atol=1e-12)
    assert_allclose(rotation_of(x).coeffs, r.coeffs, atol=1e-12)


def test_exp_of_zero_is_identity():
    assert_allclose(exp_pure(PureDualQuaternion.zero()).coeffs, UnitDualQuaternion.identity().coeffs)


def test_exp_matches_angle_axis_pose():
    phi = 1.3
    n = PureQuaternion(0.0, 0.6, 0.8)
    p = np.array([0.2, -0.4, 0.5])
    # constant twist xi applied for unit time: exp(xi / 2)
    xi = np.concatenate((phi * n.coeffs[1:], p))
    x = exp_pure(PureDualQuaternion.from_vec6(0.5 * xi))
    assert_allclose(rotation_of(x).coeffs, rotation_from_angle_axis(phi, n).coeffs, atol=1e-12)


def test_exp_is_continuous_across_series_threshold(rng):
    b = rng.normal(size=3)
    axis = np.array([0.0, 0.0, 1.0])
    below = exp_pure(PureDualQuaternion.from_vec6(np.concatenate((0.999 * SERIES_ANGLE * axis, b))))
    above = exp_pure(PureDualQuaternion.from_vec6(np.concatenate((1.001 * SERIES_ANGLE * axis, b))))
    assert_allclose(below.coeffs, above.coeffs, atol=1e-6)


def test_log_inverts_exp(rng):
    for _ in range(200):
        v = rng.normal(size=6)
        v[:3] *= 1.5 / max(1.0, np.linalg.norm(v[:3]))
        L = log_unit(exp_pure(PureDualQuaternion.from_vec6(v)))
        assert_allclose(vec6(L), v, atol=1e-9)


def test_log_picks_the_short_branch():
    x = pose_from(rotation_from_angle_axis(1.9 * math.pi, PureQuaternion(1, 0, 0)), PureQuaternion(0, 0, 0))
    L = log_unit(x)
    assert np.linalg.norm(vec6(L)[:3]) <= 0.5 * math.pi + 1e-12

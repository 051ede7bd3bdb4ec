"""Rigid-transform algebra against rotation-matrix arithmetic."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hullguard.errors import ParameterError
from hullguard.geometry import Isometry
from hullguard.geometry.isometry import (cross3, quat_multiply, quat_rotate,
                                         quat_to_axis_angle, quat_to_matrix)


def random_quat(rng):
    q = rng.normal(size=4)
    return q / np.linalg.norm(q)


def test_quat_rotate_matches_matrix(rng):
    for _ in range(300):
        q = random_quat(rng)
        v = rng.normal(size=3) * rng.uniform(0.01, 50.0)
        assert np.allclose(quat_rotate(q, v), quat_to_matrix(q) @ v, atol=1e-11)


def test_quat_multiply_matches_matrix_product(rng):
    for _ in range(300):
        q1, q2 = random_quat(rng), random_quat(rng)
        lhs = quat_to_matrix(quat_multiply(q1, q2))
        rhs = quat_to_matrix(q1) @ quat_to_matrix(q2)
        assert np.allclose(lhs, rhs, atol=1e-11)


def test_cross3_matches_numpy(rng):
    for _ in range(200):
        a, b = rng.normal(size=3), rng.normal(size=3)
        assert np.allclose(cross3(a, b), np.cross(a, b), atol=1e-14)


def test_compose_matches_homogeneous_matrices(rng):
    for _ in range(200):
        a = Isometry(random_quat(rng), rng.normal(size=3))
        b = Isometry(random_quat(rng), rng.normal(size=3))
        c = a.compose(b)
        Ma = np.eye(4)
        Ma[:3, :3] = quat_to_matrix(a.q)
        Ma[:3, 3] = a.t
        Mb = np.eye(4)
        Mb[:3, :3] = quat_to_matrix(b.q)
        Mb[:3, 3] = b.t
        Mc = Ma @ Mb
        assert np.allclose(quat_to_matrix(c.q), Mc[:3, :3], atol=1e-10)
        assert np.allclose(c.t, Mc[:3, 3], atol=1e-10)


def test_inverse_roundtrip(rng):
    for _ in range(100):
        iso = Isometry(random_quat(rng), rng.normal(size=3))
        eye = iso.compose(iso.inverse())
        assert np.allclose(quat_to_matrix(eye.q), np.eye(3), atol=1e-10)
        assert np.allclose(eye.t, 0.0, atol=1e-10)


def test_apply_matches_matrix_on_point_sets(rng):
    iso = Isometry(random_quat(rng), rng.normal(size=3))
    pts = rng.normal(size=(50, 3))
    expect = pts @ quat_to_matrix(iso.q).T + iso.t
    assert np.allclose(iso.apply(pts), expect, atol=1e-11)


def test_axis_angle_roundtrip(rng):
    for _ in range(200):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        angle = rng.uniform(-np.pi + 1e-6, np.pi - 1e-6)
        iso = Isometry.from_axis_angle(axis, angle)
        rv = quat_to_axis_angle(iso.q)
        assert np.allclose(rv, axis * angle, atol=1e-9) or np.allclose(rv, -axis * angle, atol=1e-9)


def test_axis_angle_identity_is_zero_vector():
    assert np.allclose(quat_to_axis_angle(np.array([1.0, 0, 0, 0])), 0.0)


def test_constructor_normalizes_and_validates():
    iso = Isometry(np.array([2.0, 0, 0, 0]), np.zeros(3))
    assert np.allclose(iso.q, [1, 0, 0, 0])
    with pytest.raises(ParameterError):
        Isometry(np.zeros(4), np.zeros(3))
    with pytest.raises(ParameterError):
        Isometry(np.array([1.0, 0, 0, 0]), np.array([np.nan, 0, 0]))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rotation_preserves_lengths_and_angles(seed):
    rng = np.random.default_rng(seed)
    q = random_quat(rng)
    u, v = rng.normal(size=3), rng.normal(size=3)
    ru, rv = quat_rotate(q, u), quat_rotate(q, v)
    assert np.isclose(np.linalg.norm(ru), np.linalg.norm(u), atol=1e-10)
    assert np.isclose(ru @ rv, u @ v, atol=1e-9)

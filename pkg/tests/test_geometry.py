import numpy as np
import pytest

from desktwin.geometry import (RigidTransform, quat_from_matrix, quat_multiply,
                               quat_normalize, quat_rotation_partials,
                               quat_to_matrix, random_rotation)


def test_identity_round_trip():
    q = quat_from_matrix(np.eye(3))
    assert np.allclose(q, [1, 0, 0, 0])
    assert np.allclose(quat_to_matrix(q), np.eye(3))


def test_matrix_quaternion_round_trip(rng):
    for _ in range(50):
        R = random_rotation(rng)
        assert np.allclose(quat_to_matrix(quat_from_matrix(R)), R, atol=1e-12)


def test_quat_multiply_matches_matrix_product(rng):
    for _ in range(20):
        qa = quat_normalize(rng.normal(size=4))
        qb = quat_normalize(rng.normal(size=4))
        left = quat_to_matrix(quat_multiply(qa, qb))
        right = quat_to_matrix(qa) @ quat_to_matrix(qb)
        assert np.allclose(left, right, atol=1e-12)


def test_rotation_partials_match_finite_differences(rng):
    h = 1e-7
    for _ in range(10):
        q = quat_normalize(rng.normal(size=4))
        analytic = quat_rotation_partials(q)

        def R_of(qraw):
            return quat_to_matrix(qraw)

        # dR/dq at unit q, through normalization, equals the tangent-projected
        # raw partials; compare against FD of the *unnormalized* formula by
        # projecting the FD result the same way.
        raw_fd = np.empty((4, 3, 3))
        for a in range(4):
            e = np.zeros(4)
            e[a] = h
            raw_fd[a] = (R_of(q + e) - R_of(q - e)) / (2 * h)
        proj = np.eye(4) - np.outer(q, q)
        fd_tangent = np.einsum("ab,bij->aij", proj, raw_fd)
        an_tangent = np.einsum("ab,bij->aij", proj, analytic)
        assert np.allclose(an_tangent, fd_tangent, atol=1e-5)


def test_rigid_transform_validation():
    with pytest.raises(ValueError):
        RigidTransform(rotation=np.eye(3) * 2.0)
    reflect = np.diag([1.0, 1.0, -1.0])
    with pytest.raises(ValueError):
        RigidTransform(rotation=reflect)


def test_compose_and_inverse(rng):
    for _ in range(20):
        T1 = RigidTransform(random_rotation(rng), rng.normal(size=3))
        T2 = RigidTransform(random_rotation(rng), rng.normal(size=3))
        p = rng.normal(size=(5, 3))
        assert np.allclose(T2.compose(T1).apply(p), T2.apply(T1.apply(p)), atol=1e-12)
        back = T1.inverse().apply(T1.apply(p))
        assert np.allclose(back, p, atol=1e-12)

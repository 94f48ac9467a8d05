import numpy as np
import pytest

from app.errors import DegenerateConfigurationError, PreconditionError
from app.models.geometry import CameraMatrix
from app.services.geometry import (
    angle_deg,
    calibration_matrix,
    camera_center,
    dac_canonical,
    decompose_krc,
    normalize_homogeneous,
    project_dual_quadric,
    skew,
    viewing_direction,
)
from conftest import random_rotation, rotation_about


class TestSkew:
    def test_zero_vector(self):
        assert np.array_equal(skew((0, 0, 0)), np.zeros((3, 3)))

    def test_matches_cross_product(self):
        np.testing.assert_allclose(skew((1, 2, 3)) @ np.array([4, 5, 6]), [-3, 6, -3])

    def test_annihilates_own_vector(self, rng):
        v = rng.normal(size=3)
        np.testing.assert_allclose(skew(v) @ v, np.zeros(3), atol=1e-15)


class TestDualQuadric:
    def test_canonical_form(self):
        Q = dac_canonical()
        assert np.array_equal(Q, np.diag([1.0, 1.0, 1.0, 0.0]))
        assert np.linalg.matrix_rank(Q) == 3

    def test_identity_camera_projects_to_identity(self):
        omega = project_dual_quadric(np.eye(3, 4), dac_canonical())
        np.testing.assert_allclose(omega, np.eye(3))

    def test_projection_is_k_kt(self):
        K = np.array([[800.0, 2.0, 10.0], [0.0, 820.0, -5.0], [0.0, 0.0, 1.0]])
        P = np.column_stack([K, np.zeros(3)])
        np.testing.assert_allclose(project_dual_quadric(P, dac_canonical()), K @ K.T)

    def test_projection_is_symmetric(self, rng):
        A = rng.normal(size=(4, 4))
        omega = project_dual_quadric(rng.normal(size=(3, 4)), A + A.T)
        assert np.array_equal(omega, omega.T)


class TestCameraCenter:
    def test_origin_camera(self):
        np.testing.assert_allclose(camera_center(np.eye(3, 4)), [0, 0, 0, 1])

    def test_recovers_placed_centre(self):
        R = random_rotation(3)
        c = np.array([1.5, -2.0, 0.25])
        P = np.column_stack([R, -R @ c])
        np.testing.assert_allclose(camera_center(P), np.append(c, 1.0), atol=1e-12)

    def test_null_vector_residual(self, rng):
        P = rng.normal(size=(3, 4))
        C = camera_center(P)
        assert np.linalg.norm(P @ C) < 1e-10 * np.linalg.norm(C)

    def test_centre_at_infinity(self):
        P = np.array([[1.0, 0, 0, 0], [0, 1.0, 0, 0], [0, 0, 0, 1.0]])
        C = camera_center(P)
        assert abs(C[3]) < 1e-15
        np.testing.assert_allclose(np.abs(C), [0, 0, 1, 0])

    def test_rank_deficient_camera(self):
        P = np.zeros((3, 4))
        P[0, 0] = 1.0
        with pytest.raises(DegenerateConfigurationError):
            camera_center(P)


class TestDecomposeKRC:
    def test_recomposes_to_input(self):
        R = random_rotation(5)
        c = np.array([0.3, 1.0, -0.7])
        K = calibration_matrix(950.0)
        P = 3.7 * K @ np.column_stack([R, -R @ c])
        K_, R_, C_ = decompose_krc(P)
        Q = K_ @ np.column_stack([R_, -R_ @ C_])
        scale = np.sum(P * Q) / np.sum(Q * Q)
        assert np.max(np.abs(scale * Q - P)) < 1e-9 * np.max(np.abs(P))
        np.testing.assert_allclose(K_, K, rtol=1e-10)
        np.testing.assert_allclose(C_, c, atol=1e-12)

    def test_identity_camera(self):
        K, R, C = decompose_krc(np.eye(3, 4))
        np.testing.assert_allclose(K, np.eye(3), atol=1e-15)
        np.testing.assert_allclose(R, np.eye(3), atol=1e-15)
        np.testing.assert_allclose(C, np.zeros(3), atol=1e-15)

    def test_negative_scale_is_absorbed(self):
        R = random_rotation(8)
        P = -calibration_matrix(700.0) @ np.column_stack([R, np.ones(3)])
        K, R_, _ = decompose_krc(P)
        assert np.all(np.diag(K) > 0)
        assert np.linalg.det(R_) == pytest.approx(1.0)

    @pytest.mark.parametrize("seed", range(5))
    def test_positive_diagonal(self, seed):
        P = np.random.default_rng(seed).normal(size=(3, 4))
        K, R, _ = decompose_krc(P)
        assert np.all(np.diag(K) > 0)
        assert K[2, 2] == pytest.approx(1.0)
        np.testing.assert_allclose(R @ R.T, np.eye(3), atol=1e-12)

    def test_singular_left_block(self):
        P = np.array([[1.0, 0, 0, 1], [0, 1.0, 0, 2], [1.0, 1.0, 0, 3]])
        with pytest.raises(DegenerateConfigurationError):
            decompose_krc(P)


class TestViewingDirection:
    def test_canonical_camera(self):
        np.testing.assert_allclose(viewing_direction(np.eye(3, 4)), [0, 0, 1])

    def test_sign_of_camera_is_irrelevant(self, rng):
        P = rng.normal(size=(3, 4))
        np.testing.assert_allclose(viewing_direction(-P), viewing_direction(P))

    def test_camera_turned_around(self):
        R = rotation_about((1, 0, 0), 180.0)
        np.testing.assert_allclose(
            viewing_direction(np.column_stack([R, np.zeros(3)])), [0, 0, -1], atol=1e-15
        )

    def test_accepts_camera_matrix(self):
        np.testing.assert_allclose(viewing_direction(CameraMatrix(np.eye(3, 4))), [0, 0, 1])


class TestAngle:
    @pytest.mark.parametrize(
        "u, v, expected",
        [((1, 0, 0), (0, 1, 0), 90.0), ((1, 0, 0), (1, 0, 0), 0.0), ((1, 1, 0), (1, 0, 0), 45.0)],
    )
    def test_known_angles(self, u, v, expected):
        assert angle_deg(u, v) == pytest.approx(expected, abs=1e-12)

    def test_opposite_vectors(self):
        assert angle_deg((0, 0, 2), (0, 0, -3)) == pytest.approx(180.0)

    def test_zero_vector(self):
        with pytest.raises(PreconditionError):
            angle_deg((0, 0, 0), (1, 0, 0))


def test_normalize_homogeneous_uses_largest_coordinate():
    np.testing.assert_allclose(normalize_homogeneous([2.0, -8.0, 4.0]), [-0.25, 1.0, -0.5])
    with pytest.raises(PreconditionError):
        normalize_homogeneous([0.0, 0.0, 0.0])


def test_calibration_matrix_rejects_non_positive_focal():
    with pytest.raises(PreconditionError):
        calibration_matrix(0.0)

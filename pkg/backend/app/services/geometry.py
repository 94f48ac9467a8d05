"""
Homogeneous-geometry primitives shared by every other service.
"""

from typing import Tuple

import numpy as np
from scipy.linalg import rq

from ..errors import DegenerateConfigurationError, PreconditionError
from ..models.geometry import CameraLike, DualQuadric, as_camera_array

# Relative singular-value floor below which a matrix is treated as rank deficient
RANK_TOL = 1e-12


def skew(v) -> np.ndarray:
    """Cross-product matrix: skew(v) @ w == np.cross(v, w)"""
    x, y, z = np.asarray(v, dtype=float).reshape(3)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def normalize_homogeneous(x) -> np.ndarray:
    """Scale so the largest-magnitude coordinate equals 1"""
    x = np.asarray(x, dtype=float)
    k = int(np.argmax(np.abs(x)))
    if x[k] == 0:
        raise PreconditionError("Homogeneous vector must not be zero")
    return x / x[k]


def dac_canonical() -> DualQuadric:
    return np.diag([1.0, 1.0, 1.0, 0.0])


def project_dual_quadric(P: CameraLike, Q: DualQuadric) -> np.ndarray:
    P = as_camera_array(P)
    omega = P @ np.asarray(Q, dtype=float) @ P.T
    return 0.5 * (omega + omega.T)


def calibration_matrix(f: float) -> np.ndarray:
    if not f > 0:
        raise PreconditionError(f"Focal length must be positive, got {f}")
    return np.diag([f, f, 1.0])


def _check_left_block(M: np.ndarray) -> None:
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0 or s[-1] / s[0] < RANK_TOL:
        raise DegenerateConfigurationError("Left 3x3 block of the camera is singular")


def camera_center(P: CameraLike) -> np.ndarray:
    """
    Right null vector of P as a homogeneous 4-vector.

    Finite centres are returned with last coordinate 1; centres at infinity
    follow the largest-coordinate convention.
    """
    P = as_camera_array(P)
    _, s, vt = np.linalg.svd(P)
    if s[0] == 0 or s[2] / s[0] < RANK_TOL:
        raise DegenerateConfigurationError("Camera matrix is rank deficient")
    C = vt[-1]
    if abs(C[3]) > RANK_TOL * np.linalg.norm(C):
        M = P[:, :3]
        if np.linalg.svd(M, compute_uv=False)[-1] > RANK_TOL * s[0]:
            # refine against the left block for full precision
            return np.append(-np.linalg.solve(M, P[:, 3]), 1.0)
        return C / C[3]
    return normalize_homogeneous(C)


def decompose_krc(P: CameraLike) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Split P into K, R and the inhomogeneous centre C with P ~ K [R | -R C].

    K is upper triangular with positive diagonal and K[2, 2] == 1; R is a
    proper rotation. A negative overall scale of P is absorbed into R.
    """
    P = as_camera_array(P)
    M = P[:, :3]
    _check_left_block(M)
    K, R = rq(M)
    signs = np.diag(np.sign(np.diag(K)))
    K = K @ signs
    R = signs @ R
    if np.linalg.det(R) < 0:
        R = -R
    K = K / K[2, 2]
    C = -np.linalg.solve(M, P[:, 3])
    return K, R, C


def viewing_direction(P: CameraLike) -> np.ndarray:
    """Principal-axis direction det(M) * m3, unit length"""
    M = as_camera_array(P)[:, :3]
    _check_left_block(M)
    v = np.linalg.det(M) * M[2]
    return v / np.linalg.norm(v)


def angle_deg(u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise PreconditionError("Angle is undefined for a zero vector")
    cos = np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0)
    return float(np.degrees(np.arccos(cos)))

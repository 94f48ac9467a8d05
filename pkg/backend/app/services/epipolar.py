"""
Fundamental matrix estimation, canonical projective pairs and RANSAC.
"""

import logging
from typing import Tuple

import numpy as np

from ..errors import DegenerateConfigurationError, PreconditionError
from ..models.correspondences import CorrespondenceSet
from ..models.geometry import (
    CameraLike,
    CameraMatrix,
    CameraRole,
    Epipoles,
    FundamentalMatrix,
    as_camera_array,
)
from .geometry import camera_center, skew

logger = logging.getLogger(__name__)

MIN_CORRESPONDENCES = 8
RANK_TOL = 1e-9


def _sign_fixed(v: np.ndarray) -> np.ndarray:
    """Unit vector with its largest-magnitude component positive"""
    v = v / np.linalg.norm(v)
    return v if v[np.argmax(np.abs(v))] > 0 else -v


def _hartley_transform(x: np.ndarray) -> np.ndarray:
    """Similarity moving the centroid to the origin with RMS distance sqrt(2)"""
    centroid = x.mean(axis=0)
    rms = np.sqrt(np.mean(np.sum((x - centroid) ** 2, axis=1)))
    if rms == 0:
        raise DegenerateConfigurationError("All points coincide")
    s = np.sqrt(2.0) / rms
    return np.array(
        [[s, 0.0, -s * centroid[0]], [0.0, s, -s * centroid[1]], [0.0, 0.0, 1.0]]
    )


def enforce_rank_two(F: np.ndarray) -> np.ndarray:
    U, s, Vt = np.linalg.svd(F)
    s[2] = 0.0
    return U @ np.diag(s) @ Vt


def normalize_fundamental(F: np.ndarray) -> FundamentalMatrix:
    """Unit Frobenius norm with the largest-magnitude entry positive"""
    F = np.asarray(F, dtype=float)
    norm = np.linalg.norm(F)
    if norm == 0:
        raise PreconditionError("Fundamental matrix must not be zero")
    F = F / norm
    return F if F.flat[np.argmax(np.abs(F))] > 0 else -F


def estimate_f_eightpoint(corrs: CorrespondenceSet) -> FundamentalMatrix:
    """Normalized eight-point estimate with x2^T F x1 = 0"""
    if len(corrs) < MIN_CORRESPONDENCES:
        raise PreconditionError(
            f"Eight-point estimation needs at least {MIN_CORRESPONDENCES} "
            f"correspondences, got {len(corrs)}"
        )
    T1 = _hartley_transform(corrs.x1)
    T2 = _hartley_transform(corrs.x2)
    p1 = corrs.homogeneous1() @ T1.T
    p2 = corrs.homogeneous2() @ T2.T

    # rows of kron(x2, x1) so that A @ vec(F) stacks x2^T F x1
    A = (p2[:, :, None] * p1[:, None, :]).reshape(-1, 9)
    _, s, Vt = np.linalg.svd(A)
    if s[0] == 0 or s[7] / s[0] < 1e-12:
        raise DegenerateConfigurationError("Eight-point design matrix is rank deficient")
    F = enforce_rank_two(Vt[-1].reshape(3, 3))
    F = T2.T @ F @ T1
    return normalize_fundamental(enforce_rank_two(F))


def sampson_error(F: FundamentalMatrix, x1, x2):
    """
    First-order geometric error in pixels^2.

    Accepts single points or (n, 2) / (n, 3) arrays; a zero denominator
    yields +inf.
    """
    F = np.asarray(F, dtype=float)
    x1 = np.atleast_2d(np.asarray(x1, dtype=float))
    x2 = np.atleast_2d(np.asarray(x2, dtype=float))
    if x1.shape[1] == 2:
        x1 = np.column_stack([x1, np.ones(len(x1))])
    if x2.shape[1] == 2:
        x2 = np.column_stack([x2, np.ones(len(x2))])

    Fx1 = x1 @ F.T
    Ftx2 = x2 @ F
    num = np.sum(x2 * Fx1, axis=1) ** 2
    den = Fx1[:, 0] ** 2 + Fx1[:, 1] ** 2 + Ftx2[:, 0] ** 2 + Ftx2[:, 1] ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        err = np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)
    return float(err[0]) if err.shape == (1,) else err


def ransac_f(
    corrs: CorrespondenceSet, iterations: int, threshold: float, seed: int
) -> Tuple[FundamentalMatrix, np.ndarray]:
    """
    Robust F by minimal-sample consensus.

    Trial i draws its sample from SeedSequence([seed, i]) so the result does
    not depend on evaluation order. Models are scored by inlier count, then by
    lower summed inlier Sampson error; the winner is re-fit on its inliers.
    """
    n = len(corrs)
    if iterations <= 0:
        raise PreconditionError("RANSAC needs a positive iteration count")
    if n < MIN_CORRESPONDENCES:
        raise PreconditionError(
            f"RANSAC needs at least {MIN_CORRESPONDENCES} correspondences, got {n}"
        )

    best_mask = None
    best_score = (-1, np.inf)
    for i in range(iterations):
        rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
        sample = rng.choice(n, MIN_CORRESPONDENCES, replace=False)
        try:
            F = estimate_f_eightpoint(corrs.subset(sample))
        except DegenerateConfigurationError:
            continue
        err = sampson_error(F, corrs.x1, corrs.x2)
        mask = err <= threshold
        score = (int(mask.sum()), float(err[mask].sum()))
        if score[0] > best_score[0] or (
            score[0] == best_score[0] and score[1] < best_score[1]
        ):
            best_score, best_mask = score, mask

    if best_mask is None or best_score[0] < MIN_CORRESPONDENCES:
        raise DegenerateConfigurationError(
            f"No model reached {MIN_CORRESPONDENCES} inliers in {iterations} trials"
        )

    F = estimate_f_eightpoint(corrs.subset(np.flatnonzero(best_mask)))
    mask = sampson_error(F, corrs.x1, corrs.x2) <= threshold
    if mask.sum() < MIN_CORRESPONDENCES:
        mask = best_mask
    logger.info("RANSAC consensus: %d of %d correspondences", int(mask.sum()), n)
    return F, mask


def epipoles(F: FundamentalMatrix) -> Epipoles:
    F = np.asarray(F, dtype=float)
    U, s, Vt = np.linalg.svd(F)
    if s[0] == 0 or s[1] / s[0] < RANK_TOL or s[2] / s[0] > RANK_TOL:
        raise PreconditionError(
            f"Fundamental matrix must have rank 2 (singular values {s})"
        )
    return Epipoles(e=_sign_fixed(Vt[2]), a=_sign_fixed(U[:, 2]))


def canonical_pair(F: FundamentalMatrix) -> Tuple[CameraMatrix, CameraMatrix]:
    """P1 = [I | 0], P2 = [[a]x F | a] with a the unit left null vector of F"""
    a = epipoles(F).a
    P1 = CameraMatrix(np.eye(3, 4), CameraRole.PROJECTIVE)
    P2 = CameraMatrix(
        np.column_stack([skew(a) @ np.asarray(F, dtype=float), a]),
        CameraRole.PROJECTIVE,
    )
    return P1, P2


def fundamental_from_cameras(P1: CameraLike, P2: CameraLike) -> FundamentalMatrix:
    """F = [P2 C1]x P2 P1^+ for a pair of finite cameras"""
    P1 = as_camera_array(P1)
    P2 = as_camera_array(P2)
    e2 = P2 @ camera_center(P1)
    return skew(e2) @ P2 @ np.linalg.pinv(P1)

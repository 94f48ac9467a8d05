"""
Linear two-view self-calibration with unknown, different focal lengths.

The second projective camera P2 = [m_ij | t_i] of a canonical pair is upgraded
by H = [[K1, 0], [-p^T K1, 1]]. Requiring the upgraded camera's dual image of
the absolute conic to be diag(f2^2, f2^2, 1) gives equations that are linear in

    x = (f1^2, f2^2, f1^2 p1^2 + f1^2 p2^2 + p3^2, p3, f1^2 p1, f1^2 p2)

Five of them are kept. Their matrix has a one-dimensional null space, so
after elimination the third complex closes a quadratic in f1^2 p2 whose two
roots are the mirror-image metric reconstructions. The forward pass leaves
f2^2 multiplied by an unknown block scale; running the same solve on F^T
recovers f2 directly.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import (
    DegenerateConfigurationError,
    PairCalibError,
    PreconditionError,
    StructureViolationError,
)
from ..models.correspondences import CorrespondenceSet
from ..models.geometry import (
    CameraLike,
    CameraMatrix,
    CameraRole,
    FundamentalMatrix,
    as_camera_array,
)
from .epipolar import (
    MIN_CORRESPONDENCES,
    canonical_pair,
    estimate_f_eightpoint,
    normalize_fundamental,
    ransac_f,
)
from .geometry import (
    angle_deg,
    calibration_matrix,
    camera_center,
    decompose_krc,
    viewing_direction,
)

logger = logging.getLogger(__name__)

# Source element of the upgraded DIAC behind each row, 1-based (row, col)
ROW_TAGS = ((2, 2), (2, 3), (1, 3), (1, 1), (1, 2), (3, 3))

PIVOT_TOL = 1e-10
STRUCTURE_TOL = 1e-8
DISCRIMINANT_TOL = 1e-8
TRIANGULATION_TOL = 1e-12


@dataclass(frozen=True)
class UnknownVector:
    values: np.ndarray

    @property
    def f1_sq(self) -> float:
        return float(self.values[0])

    @property
    def f2_sq(self) -> float:
        """Second focal complex; carries the block scale after a forward pass"""
        return float(self.values[1])

    @property
    def plane(self) -> np.ndarray:
        """Plane at infinity (p1, p2, p3), the fourth coordinate being 1"""
        x1, _, _, x4, x5, x6 = self.values
        return np.array([x5 / x1, x6 / x1, x4])

    def consistency_residual(self) -> float:
        x1, _, x3, x4, x5, x6 = self.values
        return float(x3 - ((x5**2 + x6**2) / x1 + x4**2))

    @classmethod
    def from_parameters(cls, f1: float, f2_sq: float, p) -> "UnknownVector":
        p1, p2, p3 = np.asarray(p, dtype=float)
        f1_sq = f1 * f1
        return cls(
            np.array(
                [
                    f1_sq,
                    f2_sq,
                    f1_sq * (p1**2 + p2**2) + p3**2,
                    p3,
                    f1_sq * p1,
                    f1_sq * p2,
                ]
            )
        )


@dataclass(frozen=True)
class AugmentedSystem:
    """[A | b] with one row per DIAC element listed in ``tags``"""

    matrix: np.ndarray
    tags: Tuple[Tuple[int, int], ...] = ROW_TAGS

    @property
    def A(self) -> np.ndarray:
        return self.matrix[:, :6]

    @property
    def b(self) -> np.ndarray:
        return self.matrix[:, 6]

    def residual(self, x: UnknownVector) -> np.ndarray:
        return self.A @ x.values - self.b


@dataclass(frozen=True)
class ReducedSystem:
    """
    Echelon form of the five kept rows:

        x1 = b1, x2 = b2, x3 = b3, x4 + c x6 = b4, x5 + d x6 = b5
    """

    b: np.ndarray
    c: float
    d: float

    def echelon(self) -> np.ndarray:
        E = np.zeros((5, 7))
        E[:, :5] = np.eye(5)
        E[3, 5] = self.c
        E[4, 5] = self.d
        E[:, 6] = self.b
        return E


@dataclass(frozen=True)
class CandidatePair:
    """One metric camera pair together with the plane and upgrade producing it"""

    P1: CameraMatrix
    P2: CameraMatrix
    plane: np.ndarray
    homography: np.ndarray

    def flipped(self) -> "CandidatePair":
        """The twisted pair: same left blocks, opposite translation"""
        M = self.P2.matrix.copy()
        M[:, 3] = -M[:, 3]
        return CandidatePair(self.P1, CameraMatrix(M, self.P2.role), self.plane, self.homography)


@dataclass(frozen=True)
class CheiralityVotes:
    chosen: Optional[int]
    front2: Tuple[int, int]
    front1: Tuple[int, int]
    total: int
    degenerate: int = 0

    @property
    def ratio(self) -> float:
        if self.chosen is None or self.total == 0:
            return float("nan")
        return self.front2[self.chosen] / self.total


@dataclass(frozen=True)
class CalibrationOptions:
    consistency_tol: float = 0.01
    # None picks the RMS radius of the matched points, or a scale read off F without points
    coordinate_scale: Optional[float] = None


@dataclass(frozen=True)
class PairSolution:
    """
    Both metric candidates and the recovered focal lengths.

    ``candidates`` are the raw mirror solutions; ``oriented`` are the same
    cameras with the translation sign chosen so that points lie in front of
    camera 1. ``chosen`` indexes both tuples and is None when undecided.
    """

    f1: float
    f2: float
    candidates: Tuple[CandidatePair, CandidatePair]
    oriented: Tuple[CandidatePair, CandidatePair]
    unknowns: Tuple[UnknownVector, UnknownVector]
    votes: CheiralityVotes
    block_scale: float
    forward_f2: float
    reverse_f1: float
    consistent: bool
    coordinate_scale: float
    fundamental: FundamentalMatrix
    rotation: Optional[np.ndarray] = None
    translation: Optional[np.ndarray] = None

    @property
    def chosen(self) -> Optional[int]:
        return self.votes.chosen

    @property
    def planes(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.candidates[0].plane, self.candidates[1].plane

    @property
    def final_pair(self) -> Optional[Tuple[CameraMatrix, CameraMatrix]]:
        """[K1 | 0] and K2 [R | t] with unit baseline, once a candidate is chosen"""
        if self.rotation is None:
            return None
        P1 = np.column_stack([calibration_matrix(self.f1), np.zeros(3)])
        P2 = calibration_matrix(self.f2) @ np.column_stack([self.rotation, self.translation])
        return CameraMatrix(P1, CameraRole.METRIC), CameraMatrix(P2, CameraRole.METRIC)


@dataclass(frozen=True)
class GeometryCheck:
    name: str
    value: float
    tolerance: float
    passed: bool


@dataclass
class GeometryReport:
    checks: List[GeometryCheck] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def by_name(self, name: str) -> GeometryCheck:
        return next(check for check in self.checks if check.name == name)


def build_augmented_system(P2: CameraLike) -> AugmentedSystem:
    P = as_camera_array(P2)
    m, t = P[:, :3], P[:, 3]
    rows = []
    for i, j in ROW_TAGS:
        mi, mj, ti, tj = m[i - 1], m[j - 1], t[i - 1], t[j - 1]
        diagonal = -1.0 if (i, j) in ((1, 1), (2, 2)) else 0.0
        rhs = 1.0 - mi[2] * mj[2] if (i, j) == (3, 3) else -mi[2] * mj[2]
        rows.append(
            [
                mi[0] * mj[0] + mi[1] * mj[1],
                diagonal,
                ti * tj,
                -(tj * mi[2] + ti * mj[2]),
                -(tj * mi[0] + ti * mj[0]),
                -(tj * mi[1] + ti * mj[1]),
                rhs,
            ]
        )
    return AugmentedSystem(np.array(rows))


def structured_reduce(system: AugmentedSystem) -> ReducedSystem:
    """
    Gauss-Jordan elimination of the first five rows on columns 1-5.

    The sixth row, (3, 3), fixes the overall scale of the DIAC and is never
    read. For a canonical pair the x6 column must vanish in rows 1-3.
    """
    work = np.array(system.matrix[:5], dtype=float)
    row_max = np.max(np.abs(work[:, :6]), axis=1)
    if np.any(row_max == 0):
        raise DegenerateConfigurationError("Linear system has an all-zero row")
    work /= row_max[:, None]

    for col in range(5):
        pivot = col + int(np.argmax(np.abs(work[col:, col])))
        scale = np.max(np.abs(work[pivot, :6]))
        if abs(work[pivot, col]) < PIVOT_TOL * scale:
            raise DegenerateConfigurationError(
                f"Pivot in column {col + 1} below tolerance; degenerate camera geometry"
            )
        work[[col, pivot]] = work[[pivot, col]]
        work[col] /= work[col, col]
        for row in range(5):
            if row != col:
                work[row] -= work[row, col] * work[col]

    coupling = work[:, 5]
    limit = STRUCTURE_TOL * max(1.0, abs(coupling[3]), abs(coupling[4]))
    if np.any(np.abs(coupling[:3]) > limit):
        raise StructureViolationError(
            "Reduced system lacks the zero column pattern; P2 is not a canonical pair"
        )
    return ReducedSystem(b=work[:, 6].copy(), c=float(coupling[3]), d=float(coupling[4]))


def solve_unknowns(reduced: ReducedSystem) -> Tuple[UnknownVector, UnknownVector]:
    b1, b2, b3, b4, b5 = reduced.b
    c, d = reduced.c, reduced.d
    if not b1 > 0:
        raise DegenerateConfigurationError(f"Recovered f1^2 is not positive ({b1:.6g})")

    qa = (1.0 + d * d) / b1 + c * c
    qb = -2.0 * (b5 * d / b1 + b4 * c)
    qc = b5 * b5 / b1 + b4 * b4 - b3
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0:
        if -disc > DISCRIMINANT_TOL * (qb * qb + abs(4.0 * qa * qc)):
            raise DegenerateConfigurationError(
                f"Negative discriminant {disc:.6g}; no real plane at infinity"
            )
        logger.warning("Clamping slightly negative discriminant %.3g to zero", disc)
        disc = 0.0

    root = np.sqrt(disc)
    q = -0.5 * (qb + np.copysign(root, qb))
    if q == 0:
        roots = (-qb / (2.0 * qa),) * 2
    elif qb >= 0:
        roots = (qc / q, q / qa)
    else:
        roots = (q / qa, qc / q)

    return tuple(
        UnknownVector(np.array([b1, b2, b3, b4 - c * x6, b5 - d * x6, x6]))
        for x6 in roots
    )


def homography_from_solution(f1: float, p) -> np.ndarray:
    K1 = calibration_matrix(f1)
    H = np.zeros((4, 4))
    H[:3, :3] = K1
    H[3, :3] = -np.asarray(p, dtype=float) @ K1
    H[3, 3] = 1.0
    return H


def _metric_normalized(P: np.ndarray) -> np.ndarray:
    """Positive rescale giving the left block a unit third row"""
    norm = np.linalg.norm(P[2, :3])
    return P / (norm if norm > 0 else np.linalg.norm(P))


def metric_pair(P_P1: CameraLike, P_P2: CameraLike, H) -> Tuple[CameraMatrix, CameraMatrix]:
    H = np.asarray(H, dtype=float)
    return tuple(
        CameraMatrix(_metric_normalized(as_camera_array(P) @ H), CameraRole.METRIC)
        for P in (P_P1, P_P2)
    )


def _dlt_rows(P: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Two cross-product constraints per view, for (n, 3) homogeneous points"""
    r1 = x[:, 0, None] * P[2] - x[:, 2, None] * P[0]
    r2 = x[:, 1, None] * P[2] - x[:, 2, None] * P[1]
    return np.stack([r1, r2], axis=1)


def triangulate_points(
    P1: CameraLike, P2: CameraLike, x1: np.ndarray, x2: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorized DLT. Returns (n, 4) homogeneous points and a mask of
    degenerate (rank-deficient) configurations.
    """
    P1, P2 = as_camera_array(P1), as_camera_array(P2)
    x1 = np.atleast_2d(np.asarray(x1, dtype=float))
    x2 = np.atleast_2d(np.asarray(x2, dtype=float))
    if x1.shape[1] == 2:
        x1 = np.column_stack([x1, np.ones(len(x1))])
    if x2.shape[1] == 2:
        x2 = np.column_stack([x2, np.ones(len(x2))])

    A = np.concatenate([_dlt_rows(P1, x1), _dlt_rows(P2, x2)], axis=1)
    norms = np.linalg.norm(A, axis=2, keepdims=True)
    A = A / np.where(norms > 0, norms, 1.0)
    _, s, Vt = np.linalg.svd(A)
    degenerate = (s[:, 0] == 0) | (s[:, 2] < TRIANGULATION_TOL * s[:, 0])
    X = Vt[:, 3, :]
    finite = np.abs(X[:, 3]) > TRIANGULATION_TOL
    X = np.where(finite[:, None], X / np.where(finite, X[:, 3], 1.0)[:, None], X)
    return X, degenerate


def triangulate_dlt(P1: CameraLike, P2: CameraLike, x1, x2) -> np.ndarray:
    X, degenerate = triangulate_points(P1, P2, np.reshape(x1, (1, -1)), np.reshape(x2, (1, -1)))
    if degenerate[0]:
        raise DegenerateConfigurationError("Triangulation rays are degenerate")
    return X[0]


def depth_sign(P: CameraLike, X) -> int:
    """+1 in front of the camera, -1 behind, 0 on the principal plane or at infinity"""
    P = as_camera_array(P)
    X = np.asarray(X, dtype=float)
    w = float(P[2] @ X)
    value = w * X[3] * np.linalg.det(P[:, :3])
    return int(np.sign(value))


def _depth_signs(P: np.ndarray, X: np.ndarray) -> np.ndarray:
    return np.sign((X @ P[2]) * X[:, 3] * np.linalg.det(P[:, :3])).astype(int)


def orient_candidate(candidate: CandidatePair, corrs: CorrespondenceSet) -> CandidatePair:
    """Flip the translation sign when most points land behind camera 1"""
    if len(corrs) == 0:
        return candidate
    X, degenerate = triangulate_points(candidate.P1, candidate.P2, corrs.x1, corrs.x2)
    signs = _depth_signs(candidate.P1.matrix, X[~degenerate])
    return candidate.flipped() if np.sum(signs) < 0 else candidate


def cheirality_select(
    candidates: Sequence[CandidatePair], corrs: CorrespondenceSet
) -> CheiralityVotes:
    """
    Count points triangulated in front of each candidate's second camera and
    pick the strict winner. Camera-1 votes are recorded for diagnostics.
    """
    n = len(corrs)
    if n == 0:
        return CheiralityVotes(None, (0, 0), (0, 0), 0)

    front1, front2, degenerate_counts = [], [], []
    for candidate in candidates:
        X, degenerate = triangulate_points(candidate.P1, candidate.P2, corrs.x1, corrs.x2)
        valid = X[~degenerate]
        front1.append(int(np.sum(_depth_signs(candidate.P1.matrix, valid) > 0)))
        front2.append(int(np.sum(_depth_signs(candidate.P2.matrix, valid) > 0)))
        degenerate_counts.append(int(degenerate.sum()))
    if min(degenerate_counts) == n:
        raise DegenerateConfigurationError("Every triangulation is degenerate")

    if front2[0] > front2[1]:
        chosen = 0
    elif front2[1] > front2[0]:
        chosen = 1
    else:
        chosen = None
        logger.warning("Cheirality votes tied at %d; candidate left undecided", front2[0])
    return CheiralityVotes(chosen, tuple(front2), tuple(front1), n, max(degenerate_counts))


@dataclass(frozen=True)
class _PassResult:
    P1: CameraMatrix
    P2: CameraMatrix
    system: AugmentedSystem
    reduced: ReducedSystem
    unknowns: Tuple[UnknownVector, UnknownVector]


def _solve_pass(F: np.ndarray) -> _PassResult:
    P1, P2 = canonical_pair(F)
    system = build_augmented_system(P2)
    reduced = structured_reduce(system)
    return _PassResult(P1, P2, system, reduced, solve_unknowns(reduced))


def _focal_from_camera(P: np.ndarray) -> float:
    M = P[:, :3]
    omega = M @ M.T
    return float(np.sqrt(0.5 * (omega[0, 0] + omega[1, 1]) / omega[2, 2]))


def _coordinate_scale(corrs: Optional[CorrespondenceSet]) -> Optional[float]:
    if corrs is None or len(corrs) == 0:
        return None
    pts = np.vstack([corrs.x1, corrs.x2])
    rms = float(np.sqrt(np.mean(np.sum(pts**2, axis=1))))
    return rms if rms > 0 else None


def _scale_from_fundamental(F: np.ndarray) -> float:
    """
    Pixel scale implied by F alone: the last row and column grow like 1/f
    and the upper-left block like 1/f^2, so their ratio is of order f.
    """
    edge = np.linalg.norm(F[:2, 2]) + np.linalg.norm(F[2, :2])
    block = 2.0 * np.linalg.norm(F[:2, :2])
    ratio = edge / block if block > 0 else 0.0
    return float(ratio) if np.isfinite(ratio) and ratio > 0 else 1.0


def calibrate_pair(
    F: Optional[FundamentalMatrix] = None,
    corrs: Optional[CorrespondenceSet] = None,
    options: Optional[CalibrationOptions] = None,
) -> PairSolution:
    """
    Recover f1, f2 and both metric candidates from F (or from matches).

    With correspondences available the candidates are oriented and the one
    placing more points in front of camera 2 is chosen.
    """
    options = options or CalibrationOptions()
    if F is None:
        if corrs is None:
            raise PreconditionError("Either a fundamental matrix or correspondences are required")
        F = estimate_f_eightpoint(corrs)
    F = normalize_fundamental(F)

    s = options.coordinate_scale or _coordinate_scale(corrs) or _scale_from_fundamental(F)
    T = np.diag([s, s, 1.0])
    Fn = normalize_fundamental(T @ F @ T)

    forward = _solve_pass(Fn)
    reverse = _solve_pass(Fn.T)
    f1n = np.sqrt(forward.reduced.b[0])
    f2n = np.sqrt(reverse.reduced.b[0])
    scaled_f2_sq = forward.reduced.b[1]
    if not scaled_f2_sq > 0:
        raise DegenerateConfigurationError(
            f"Scaled second focal complex is not positive ({scaled_f2_sq:.6g})"
        )
    block_scale = float(np.sqrt(scaled_f2_sq) / f2n)

    candidates = []
    for unknowns in forward.unknowns:
        H = homography_from_solution(f1n, unknowns.plane)
        PM1, PM2 = metric_pair(forward.P1, forward.P2, H)
        candidates.append(
            CandidatePair(
                CameraMatrix(T @ PM1.matrix, CameraRole.METRIC),
                CameraMatrix(T @ PM2.matrix, CameraRole.METRIC),
                unknowns.plane,
                H,
            )
        )

    f1, f2 = float(s * f1n), float(s * f2n)
    forward_f2 = _focal_from_camera(candidates[0].P2.matrix)
    H_rev = homography_from_solution(f2n, reverse.unknowns[0].plane)
    _, reverse_P2 = metric_pair(reverse.P1, reverse.P2, H_rev)
    reverse_f1 = s * _focal_from_camera(reverse_P2.matrix)
    consistent = (
        abs(forward_f2 / f2 - 1.0) <= options.consistency_tol
        and abs(reverse_f1 / f1 - 1.0) <= options.consistency_tol
    )
    if not consistent:
        logger.warning(
            "Forward and reverse focal estimates disagree: f1 %.4g vs %.4g, f2 %.4g vs %.4g",
            f1, reverse_f1, f2, forward_f2,
        )

    if corrs is not None and len(corrs) > 0:
        oriented = tuple(orient_candidate(candidate, corrs) for candidate in candidates)
        votes = cheirality_select(oriented, corrs)
    else:
        oriented = tuple(candidates)
        votes = CheiralityVotes(None, (0, 0), (0, 0), 0)

    rotation = translation = None
    if votes.chosen is not None:
        _, R, C = decompose_krc(oriented[votes.chosen].P2)
        rotation = R
        translation = -R @ (C / np.linalg.norm(C))
        logger.info(
            "Selected candidate %d with %d of %d front votes",
            votes.chosen, votes.front2[votes.chosen], votes.total,
        )

    return PairSolution(
        f1=f1,
        f2=f2,
        candidates=tuple(candidates),
        oriented=oriented,
        unknowns=forward.unknowns,
        votes=votes,
        block_scale=block_scale,
        forward_f2=forward_f2,
        reverse_f1=float(reverse_f1),
        consistent=consistent,
        coordinate_scale=float(s),
        fundamental=F,
        rotation=rotation,
        translation=translation,
    )


def _with_unit_centre(P: np.ndarray) -> np.ndarray:
    """Metric scale with ||K2^-1 a|| = 1, i.e. a unit camera centre"""
    P = _metric_normalized(P)
    K, _, _ = decompose_krc(P)
    P = P.copy()
    P[:, 3] /= np.linalg.norm(np.linalg.solve(K, P[:, 3]))
    return P


def verify_solution_geometry(solution: PairSolution, tol: float = 1e-6) -> GeometryReport:
    """Mirror, bisector and calibration identities relating the two candidates"""
    cams = [_with_unit_centre(c.P2.matrix) for c in solution.candidates]
    centres = [camera_center(P)[:3] for P in cams]
    views = [viewing_direction(P) for P in cams]
    Ks = [decompose_krc(P)[0] for P in cams]
    omegas = [P[:, :3] @ P[:, :3].T for P in cams]
    c1, c2 = centres
    v1, v2 = views

    report = GeometryReport()

    def add(name: str, value: float) -> None:
        report.checks.append(GeometryCheck(name, float(value), tol, bool(value <= tol)))

    add("mirror_centres", np.linalg.norm(c1 + c2) / np.linalg.norm(c1))
    add("bisector_centre_1", abs(angle_deg(c1, v1) - angle_deg(c1, v2)))
    add("bisector_centre_2", abs(angle_deg(c2, v1) - angle_deg(c2, v2)))
    add("supplementary_view_1", abs(angle_deg(c1, v1) + angle_deg(c2, v1) - 180.0))
    add("supplementary_view_2", abs(angle_deg(c1, v2) + angle_deg(c2, v2) - 180.0))
    add("equal_calibration", np.linalg.norm(Ks[0] - Ks[1]) / np.linalg.norm(Ks[0]))
    add(
        "shared_omega",
        np.linalg.norm(omegas[0] / np.linalg.norm(omegas[0]) - omegas[1] / np.linalg.norm(omegas[1])),
    )
    det_product = np.sign(np.linalg.det(cams[0][:, :3])) * np.sign(np.linalg.det(cams[1][:, :3]))
    report.checks.append(GeometryCheck("opposite_determinants", float(det_product), 0.0, det_product < 0))
    return report


def sample_pair_estimates(
    corrs: CorrespondenceSet,
    n_samples: int,
    seed: int,
    options: Optional[CalibrationOptions] = None,
) -> List[PairSolution]:
    """
    Solve the pair from random minimal eight-point samples.

    Each sample's F is estimated from its eight matches; cheirality uses the
    full set. Samples whose solve fails are skipped.
    """
    if len(corrs) < MIN_CORRESPONDENCES:
        raise PreconditionError(
            f"Sampling needs at least {MIN_CORRESPONDENCES} correspondences, got {len(corrs)}"
        )
    options = options or CalibrationOptions(coordinate_scale=_coordinate_scale(corrs))
    solutions = []
    for k in range(n_samples):
        rng = np.random.default_rng(np.random.SeedSequence([seed, k]))
        sample = rng.choice(len(corrs), MIN_CORRESPONDENCES, replace=False)
        try:
            F = estimate_f_eightpoint(corrs.subset(sample))
            solutions.append(calibrate_pair(F, corrs, options))
        except PairCalibError as exc:
            logger.debug("Sample %d skipped: %s", k, exc)
    logger.info("%d of %d minimal samples solved", len(solutions), n_samples)
    return solutions


@dataclass
class CalibrationRun:
    solution: PairSolution
    inliers: np.ndarray
    geometry: GeometryReport


class SelfCalibrationService:
    def __init__(
        self,
        ransac_iters: int = 1000,
        sampson_thresh: float = 1.0,
        consistency_tol: float = 0.01,
    ):
        self.ransac_iters = ransac_iters
        self.sampson_thresh = sampson_thresh
        self.options = CalibrationOptions(consistency_tol=consistency_tol)

    def calibrate(
        self, corrs: CorrespondenceSet, seed: int = 0, use_ransac: bool = True
    ) -> CalibrationRun:
        """Robust F, self-calibration on the inliers, and the candidate geometry checks"""
        if len(corrs) < MIN_CORRESPONDENCES:
            raise PreconditionError(
                f"Calibration needs at least {MIN_CORRESPONDENCES} correspondences, got {len(corrs)}"
            )
        if use_ransac:
            F, inliers = ransac_f(corrs, self.ransac_iters, self.sampson_thresh, seed)
        else:
            F, inliers = estimate_f_eightpoint(corrs), np.ones(len(corrs), dtype=bool)
        solution = calibrate_pair(F, corrs.subset(np.flatnonzero(inliers)), self.options)
        return CalibrationRun(solution, inliers, verify_solution_geometry(solution))

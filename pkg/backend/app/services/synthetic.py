"""
Synthetic ground truth and error metrics: camera pairs with known focal
lengths, order-preserving match sets, rotation graphs and focal-estimate
pools, plus the noise benchmark over a sigma grid.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.spatial.transform import Rotation

from ..errors import DegenerateConfigurationError, PairCalibError, PreconditionError
from ..models.correspondences import CorrespondenceSet, ImageInfo
from .averaging import FocalEstimatePool, RotationGraph, delta_f, geodesic_distance
from .epipolar import estimate_f_eightpoint, fundamental_from_cameras, normalize_fundamental
from .geometry import angle_deg, calibration_matrix
from .self_calibration import PairSolution, calibrate_pair

logger = logging.getLogger(__name__)

Seed = Union[int, np.random.SeedSequence]

IMAGE_SIZE = (2000.0, 1500.0)
FOCAL_RANGE = (800.0, 1500.0)
SIGMA_GRID = (0.0, 0.25, 0.5, 1.0, 2.0)
BENCHMARK_COLUMNS = [
    "sigma",
    "trial_count",
    "med_dR_deg",
    "med_dt_deg",
    "med_df1",
    "med_df2",
    "frac_dR_lt_5",
    "frac_dR_lt_10",
]


@dataclass(frozen=True)
class SceneCamera:
    f: float
    R: np.ndarray
    C: np.ndarray

    @property
    def K(self) -> np.ndarray:
        return calibration_matrix(self.f)

    @property
    def P(self) -> np.ndarray:
        return self.K @ np.column_stack([self.R, -self.R @ self.C])

    def camera_coordinates(self, X: np.ndarray) -> np.ndarray:
        return (X - self.C) @ self.R.T

    def project(self, X: np.ndarray) -> np.ndarray:
        Xc = self.camera_coordinates(X)
        return self.f * Xc[:, :2] / Xc[:, 2:3]


@dataclass(frozen=True)
class SyntheticScene:
    cameras: Tuple[SceneCamera, SceneCamera]
    points: np.ndarray
    sigma: float
    image_size: Tuple[float, float] = IMAGE_SIZE

    @property
    def fundamental(self) -> np.ndarray:
        return normalize_fundamental(
            fundamental_from_cameras(self.cameras[0].P, self.cameras[1].P)
        )

    def relative_pose(self) -> Tuple[np.ndarray, np.ndarray]:
        return relative_pose(*self.cameras)


def relative_pose(cam1: SceneCamera, cam2: SceneCamera) -> Tuple[np.ndarray, np.ndarray]:
    """Rotation and unit translation of camera 2 expressed in camera 1's frame"""
    t = cam2.R @ (cam1.C - cam2.C)
    return cam2.R @ cam1.R.T, t / np.linalg.norm(t)


def look_at(centre: np.ndarray, target: np.ndarray) -> np.ndarray:
    z = target - centre
    z = z / np.linalg.norm(z)
    x = np.cross([0.0, 1.0, 0.0], z)
    x = x / np.linalg.norm(x)
    return np.vstack([x, np.cross(z, x), z])


def _random_axis(rng: np.random.Generator) -> np.ndarray:
    axis = rng.normal(size=3)
    return axis / np.linalg.norm(axis)


def make_scene(
    n_points: int = 200,
    f1: Optional[float] = None,
    f2: Optional[float] = None,
    baseline: float = 1.0,
    rotation_offset_deg: Tuple[float, float] = (5.0, 15.0),
    sigma: float = 0.0,
    seed: Seed = 0,
    image_size: Tuple[float, float] = IMAGE_SIZE,
    max_tries: int = 100,
) -> Tuple[SyntheticScene, CorrespondenceSet]:
    """
    Camera 1 at the origin with identity rotation; camera 2 at ``baseline``
    along a random direction with a sizeable vertical component, aimed at
    the scene centre and then turned by a random offset so the optical axes
    do not meet. Points are rejection-sampled in a box ahead of both cameras
    until every one is in front of and visible to each camera.
    """
    if n_points < 8:
        raise PreconditionError(f"A scene needs at least 8 points, got {n_points}")
    rng = np.random.default_rng(seed)
    f1 = float(f1) if f1 is not None else float(rng.uniform(*FOCAL_RANGE))
    f2 = float(f2) if f2 is not None else float(rng.uniform(*FOCAL_RANGE))

    target = np.array([0.0, 0.0, 6.0 * baseline])
    direction = np.array(
        [
            rng.uniform(-1.0, 1.0),
            rng.choice([-1.0, 1.0]) * rng.uniform(0.3, 1.0),
            rng.uniform(-0.3, 0.3),
        ]
    )
    C2 = baseline * direction / np.linalg.norm(direction)
    offset = Rotation.from_rotvec(
        np.radians(rng.uniform(*rotation_offset_deg)) * _random_axis(rng)
    ).as_matrix()
    cameras = (
        SceneCamera(f1, np.eye(3), np.zeros(3)),
        SceneCamera(f2, offset @ look_at(C2, target), C2),
    )

    half_w, half_h = 0.5 * image_size[0], 0.5 * image_size[1]
    half_box = 1.5 * baseline
    accepted: List[np.ndarray] = []
    count = 0
    for _ in range(max_tries):
        X = target + rng.uniform(-half_box, half_box, size=(4 * n_points, 3))
        ok = np.ones(len(X), dtype=bool)
        for cam in cameras:
            Xc = cam.camera_coordinates(X)
            ok &= Xc[:, 2] > 0.1 * baseline
            with np.errstate(divide="ignore", invalid="ignore"):
                uv = cam.f * Xc[:, :2] / Xc[:, 2:3]
            ok &= (np.abs(uv[:, 0]) <= half_w) & (np.abs(uv[:, 1]) <= half_h)
        accepted.append(X[ok])
        count += int(ok.sum())
        if count >= n_points:
            break
    else:
        raise DegenerateConfigurationError(
            f"Placed only {count} of {n_points} visible points after {max_tries} batches"
        )
    points = np.vstack(accepted)[:n_points]

    x1 = cameras[0].project(points) + rng.normal(0.0, sigma, size=(n_points, 2))
    x2 = cameras[1].project(points) + rng.normal(0.0, sigma, size=(n_points, 2))
    corrs = CorrespondenceSet(
        x1,
        x2,
        labels=np.ones(n_points, dtype=bool),
        image1=ImageInfo("cam1", *image_size),
        image2=ImageInfo("cam2", *image_size),
    )
    return SyntheticScene(cameras, points, float(sigma), tuple(image_size)), corrs


def relative_rotation_error(R_est, R1_gt, R2_gt) -> float:
    return geodesic_distance(R_est, np.asarray(R2_gt) @ np.asarray(R1_gt).T)


def translation_angle_error(t_est, t_gt) -> float:
    """Angle between translation directions, signed direction included (0-180 degrees)"""
    return angle_deg(t_est, t_gt)


@dataclass(frozen=True)
class PairErrorReport:
    dR: float
    dt: float
    df1: float
    df2: float
    chosen: bool
    vote_ratio: float


def evaluate_pair(solution: PairSolution, scene: SyntheticScene) -> PairErrorReport:
    cam1, cam2 = scene.cameras
    _, t_gt = relative_pose(cam1, cam2)
    if solution.rotation is None:
        dR = dt = float("nan")
    else:
        dR = relative_rotation_error(solution.rotation, cam1.R, cam2.R)
        dt = translation_angle_error(solution.translation, t_gt)
    return PairErrorReport(
        dR=dR,
        dt=dt,
        df1=delta_f(solution.f1, cam1.f),
        df2=delta_f(solution.f2, cam2.f),
        chosen=solution.chosen is not None,
        vote_ratio=solution.votes.ratio,
    )


def _median(values: np.ndarray) -> float:
    finite = values[np.isfinite(values)]
    return float(np.median(finite)) if len(finite) else float("nan")


def run_pair_benchmark(
    sigmas: Sequence[float] = SIGMA_GRID,
    trials: int = 100,
    seed: int = 0,
    n_points: int = 200,
) -> pd.DataFrame:
    """
    Median errors of the full pipeline (eight-point F, then self-calibration)
    per noise level. Trial t uses SeedSequence([seed, t]) at every level, so
    all levels share scenes and noise directions. Failed solves count as
    missing values and never as successes.
    """
    if trials < 0:
        raise PreconditionError("Trial count must be non-negative")
    rows = []
    if trials == 0:
        return pd.DataFrame(rows, columns=BENCHMARK_COLUMNS)
    for sigma in sigmas:
        errors = np.full((trials, 4), np.nan)
        for t in range(trials):
            scene, corrs = make_scene(
                n_points, sigma=sigma, seed=np.random.SeedSequence([seed, t])
            )
            try:
                solution = calibrate_pair(estimate_f_eightpoint(corrs), corrs)
            except PairCalibError as exc:
                logger.warning("sigma=%g trial %d failed: %s", sigma, t, exc)
                continue
            report = evaluate_pair(solution, scene)
            errors[t] = (report.dR, report.dt, report.df1, report.df2)
        dR = errors[:, 0]
        with np.errstate(invalid="ignore"):
            rows.append(
                {
                    "sigma": float(sigma),
                    "trial_count": trials,
                    "med_dR_deg": _median(dR),
                    "med_dt_deg": _median(errors[:, 1]),
                    "med_df1": _median(errors[:, 2]),
                    "med_df2": _median(errors[:, 3]),
                    "frac_dR_lt_5": float(np.mean(np.nan_to_num(dR, nan=np.inf) < 5.0)),
                    "frac_dR_lt_10": float(np.mean(np.nan_to_num(dR, nan=np.inf) < 10.0)),
                }
            )
    return pd.DataFrame(rows, columns=BENCHMARK_COLUMNS)


def plot_benchmark(table: pd.DataFrame, path) -> None:
    """Median rotation and focal errors against image noise, saved as an image"""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax_r, ax_f) = plt.subplots(1, 2, figsize=(10, 4))
    ax_r.plot(table["sigma"], table["med_dR_deg"], marker="o", label="rotation")
    ax_r.plot(table["sigma"], table["med_dt_deg"], marker="s", label="translation")
    ax_r.set_xlabel("noise sigma (px)")
    ax_r.set_ylabel("median error (deg)")
    ax_r.legend()
    ax_f.plot(table["sigma"], table["med_df1"], marker="o", label="f1")
    ax_f.plot(table["sigma"], table["med_df2"], marker="s", label="f2")
    ax_f.set_xlabel("noise sigma (px)")
    ax_f.set_ylabel("median relative focal error")
    ax_f.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def make_verification_scene(
    n_inliers: int = 300,
    outlier_fraction: float = 0.3,
    seed: Seed = 0,
    image_size: Tuple[float, float] = IMAGE_SIZE,
) -> CorrespondenceSet:
    """
    Inliers related by a smooth warp that is monotone in x and in y
    separately, plus uniformly random outliers. Labels mark the inliers.
    """
    if not 0 <= outlier_fraction < 1:
        raise PreconditionError("outlier_fraction must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    half = 0.5 * np.asarray(image_size, dtype=float)

    x1 = rng.uniform(-0.9 * half, 0.9 * half, size=(n_inliers, 2))
    scale = rng.uniform(0.8, 0.9, size=2)
    bend = rng.uniform(0.0, 0.05, size=2)
    shift = rng.uniform(-0.04, 0.04, size=2) * half
    x2 = scale * x1 + bend * x1**3 / half**2 + shift

    n_out = int(round(n_inliers * outlier_fraction / (1.0 - outlier_fraction)))
    o1 = rng.uniform(-half, half, size=(n_out, 2))
    o2 = rng.uniform(-half, half, size=(n_out, 2))

    order = rng.permutation(n_inliers + n_out)
    labels = np.concatenate([np.ones(n_inliers, bool), np.zeros(n_out, bool)])
    return CorrespondenceSet(
        np.vstack([x1, o1])[order],
        np.vstack([x2, o2])[order],
        labels=labels[order],
        image1=ImageInfo("view1", *image_size),
        image2=ImageInfo("view2", *image_size),
    )


def make_rotation_graph(
    n_nodes: int = 10,
    seed: Seed = 0,
    noise_deg: float = 0.0,
    corrupt_fraction: float = 0.0,
    density: float = 1.0,
) -> Tuple[RotationGraph, Dict[int, np.ndarray]]:
    """
    Random absolute rotations and the relative edges R_ij = R_j R_i^T.

    The path 0-1-...-n keeps the graph connected; other pairs are added with
    probability ``density``. Edges get Gaussian tangent noise, and a fraction
    of them is replaced by a 180 degree turn about a random axis.
    """
    if n_nodes < 1:
        raise PreconditionError("A rotation graph needs at least one node")
    rng = np.random.default_rng(seed)
    truth = {i: Rotation.random(random_state=rng).as_matrix() for i in range(n_nodes)}

    pairs = [
        (i, j)
        for i in range(n_nodes)
        for j in range(i + 1, n_nodes)
        if j == i + 1 or rng.uniform() < density
    ]
    corrupted = set()
    n_corrupt = int(round(corrupt_fraction * len(pairs)))
    if n_corrupt:
        corrupted = {pairs[k] for k in rng.choice(len(pairs), n_corrupt, replace=False)}

    graph = RotationGraph(nodes=list(range(n_nodes)))
    sigma = np.radians(noise_deg)
    for i, j in pairs:
        R_ij = truth[j] @ truth[i].T
        if sigma > 0:
            R_ij = Rotation.from_rotvec(rng.normal(0.0, sigma, 3)).as_matrix() @ R_ij
        if (i, j) in corrupted:
            R_ij = Rotation.from_rotvec(np.pi * _random_axis(rng)).as_matrix() @ R_ij
        graph.add_edge(i, j, R_ij)
    return graph, truth


def make_focal_pool_benchmark(
    seed: Seed = 0,
    n_images: int = 8,
    target_mix: Tuple[int, int, int] = (4, 5, 10),
    other_mix: Tuple[int, int] = (7, 3),
    noise: float = 0.01,
    wrong_ratio: float = 1.25,
) -> FocalEstimatePool:
    """
    Focal-estimate pool where image 0 is hard to average.

    Every pair (0, j) contributes ``target_mix`` = (good, wrong, junk)
    estimates: good ones are near both true values, wrong ones cluster near
    ``wrong_ratio`` * f0 with random partner values, junk is spread over
    1.5-6 times the truth on both sides. Pairs among the other images
    contribute (good, junk) estimates per ``other_mix``.
    """
    rng = np.random.default_rng(seed)
    truth = {i: float(rng.uniform(*FOCAL_RANGE)) for i in range(n_images)}
    pool = FocalEstimatePool(truth=truth)

    def near(f: float) -> float:
        return f * (1.0 + rng.normal(0.0, noise))

    def junk(f: float) -> float:
        return f * rng.uniform(1.5, 6.0)

    good, wrong, spread = target_mix
    for j in range(1, n_images):
        f0, fj = truth[0], truth[j]
        for n in range(good):
            pool.add_pair_estimate(f"0-{j}-g{n}", 0, j, near(f0), near(fj))
        for n in range(wrong):
            pool.add_pair_estimate(f"0-{j}-w{n}", 0, j, near(wrong_ratio * f0), fj * rng.uniform(0.5, 3.0))
        for n in range(spread):
            pool.add_pair_estimate(f"0-{j}-j{n}", 0, j, junk(f0), junk(fj))

    other_good, other_junk = other_mix
    for i in range(1, n_images):
        for j in range(i + 1, n_images):
            for n in range(other_good):
                pool.add_pair_estimate(f"{i}-{j}-g{n}", i, j, near(truth[i]), near(truth[j]))
            for n in range(other_junk):
                pool.add_pair_estimate(f"{i}-{j}-j{n}", i, j, junk(truth[i]), junk(truth[j]))
    return pool


class BenchmarkService:
    def __init__(self, n_points: int = 200):
        self.n_points = n_points

    def run(self, sigmas: Sequence[float], trials: int, seed: int) -> pd.DataFrame:
        table = run_pair_benchmark(sigmas, trials, seed, self.n_points)
        logger.info("Benchmark finished: %d sigma levels x %d trials", len(table), trials)
        return table

"""
eval: the synthetic noise benchmark written as a CSV table.
synth: a single synthetic pair written as match and camera fixtures.
"""

import argparse
import logging
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from ..models.correspondences import CorrespondenceSet
from ..models.schemas import CameraEntry
from ..services.file_formats import write_benchmark_csv, write_camera_file, write_match_file
from ..services.synthetic import SIGMA_GRID, BenchmarkService, make_scene, plot_benchmark

logger = logging.getLogger(__name__)


def sigma_grid(text: str) -> List[float]:
    """argparse type for a comma separated list of non-negative noise levels"""
    try:
        values = [float(token) for token in text.split(",") if token.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma separated list of numbers: {text!r}")
    if not values or any(not v >= 0 for v in values):
        raise argparse.ArgumentTypeError(f"noise levels must be non-negative: {text!r}")
    return values


class EvalRequest(BaseModel):
    sigma_grid: List[float] = Field(default_factory=lambda: list(SIGMA_GRID))
    trials: int = Field(default=100, ge=0)
    seed: int = 0
    points: int = Field(default=200, ge=8)
    out: Path
    plot: Optional[Path] = None


def eval_command(request: EvalRequest) -> pd.DataFrame:
    table = BenchmarkService(n_points=request.points).run(
        request.sigma_grid, request.trials, request.seed
    )
    write_benchmark_csv(request.out, table)
    if request.plot is not None and len(table):
        plot_benchmark(table, request.plot)
        logger.info("Saved benchmark plot to %s", request.plot)
    return table


class SynthRequest(BaseModel):
    points: int = Field(default=200, ge=8)
    f1: Optional[float] = Field(default=None, gt=0)
    f2: Optional[float] = Field(default=None, gt=0)
    sigma: float = Field(default=0.0, ge=0)
    seed: int = 0
    outliers: float = Field(default=0.0, ge=0, lt=1)
    out: Path
    cameras_out: Optional[Path] = None


def _with_outliers(corrs: CorrespondenceSet, fraction: float, seed: int) -> CorrespondenceSet:
    """Append uniformly placed false matches so they make up ``fraction`` of the set"""
    n_out = int(round(len(corrs) * fraction / (1.0 - fraction)))
    if n_out == 0:
        return corrs
    rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
    half = 0.5 * np.array([corrs.image1.width, corrs.image1.height])
    return CorrespondenceSet(
        np.vstack([corrs.x1, rng.uniform(-half, half, size=(n_out, 2))]),
        np.vstack([corrs.x2, rng.uniform(-half, half, size=(n_out, 2))]),
        labels=np.concatenate([corrs.labels, np.zeros(n_out, dtype=bool)]),
        image1=corrs.image1,
        image2=corrs.image2,
    )


def synth_command(request: SynthRequest) -> CorrespondenceSet:
    scene, corrs = make_scene(
        request.points, f1=request.f1, f2=request.f2, sigma=request.sigma, seed=request.seed
    )
    corrs = _with_outliers(corrs, request.outliers, request.seed)
    write_match_file(request.out, corrs)
    if request.cameras_out is not None:
        entries = [
            CameraEntry(
                id=info.id, f=cam.f, R=cam.R.reshape(-1).tolist(), C=cam.C.tolist()
            )
            for info, cam in zip((corrs.image1, corrs.image2), scene.cameras)
        ]
        write_camera_file(request.cameras_out, entries)
    return corrs


def add_parsers(subparsers, settings) -> None:
    evaluate = subparsers.add_parser("eval", help="Run the synthetic noise benchmark")
    evaluate.add_argument("--sigma-grid", type=sigma_grid, default=list(SIGMA_GRID))
    evaluate.add_argument("--trials", type=int, default=100)
    evaluate.add_argument("--seed", type=int, default=settings.seed)
    evaluate.add_argument("--points", type=int, default=200)
    evaluate.add_argument("--out", type=Path, required=True, help="Benchmark CSV")
    evaluate.add_argument("--plot", type=Path, default=None, help="Optional error plot image")
    evaluate.set_defaults(handler=run_eval)

    synth = subparsers.add_parser("synth", help="Write a synthetic pair as fixture files")
    synth.add_argument("--points", type=int, default=200)
    synth.add_argument("--f1", type=float, default=None)
    synth.add_argument("--f2", type=float, default=None)
    synth.add_argument("--sigma", type=float, default=0.0)
    synth.add_argument("--seed", type=int, default=settings.seed)
    synth.add_argument("--outliers", type=float, default=0.0, help="Fraction of false matches")
    synth.add_argument("--out", type=Path, required=True, help="Match CSV")
    synth.add_argument("--cameras-out", type=Path, default=None, help="Ground-truth camera JSON")
    synth.set_defaults(handler=run_synth)


def run_eval(args: argparse.Namespace) -> int:
    request = EvalRequest(
        sigma_grid=args.sigma_grid,
        trials=args.trials,
        seed=args.seed,
        points=args.points,
        out=args.out,
        plot=args.plot,
    )
    table = eval_command(request)
    print("📊 Synthetic benchmark")
    print("=" * 50)
    print(table.to_string(index=False) if len(table) else "No trials run")
    print(f"✅ Wrote {request.out}")
    return 0


def run_synth(args: argparse.Namespace) -> int:
    request = SynthRequest(
        points=args.points,
        f1=args.f1,
        f2=args.f2,
        sigma=args.sigma,
        seed=args.seed,
        outliers=args.outliers,
        out=args.out,
        cameras_out=args.cameras_out,
    )
    corrs = synth_command(request)
    print(f"✅ Wrote {len(corrs)} matches to {request.out}")
    if request.cameras_out is not None:
        print(f"✅ Wrote ground-truth cameras to {request.cameras_out}")
    return 0

"""
calibrate-pair: robust F, self-calibration of both focal lengths, and the
metric candidates with their cheirality votes and geometry checks.
"""

import argparse
import logging
from pathlib import Path
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

from ..errors import PreconditionError
from ..models.schemas import CandidateReport, GeometryCheckReport, PairSolutionReport
from ..services.epipolar import MIN_CORRESPONDENCES
from ..services.file_formats import read_match_file, write_model
from ..services.self_calibration import CalibrationRun, SelfCalibrationService

logger = logging.getLogger(__name__)


class CalibratePairRequest(BaseModel):
    matches: Path
    ransac_iters: int = Field(ge=0)
    sampson_thresh: float = Field(gt=0)
    seed: int
    consistency_tol: float = Field(gt=0)
    use_ransac: bool = True
    json_out: Optional[Path] = None


def build_report(run: CalibrationRun, n_correspondences: int) -> PairSolutionReport:
    solution = run.solution
    candidates = [
        CandidateReport(
            P1=candidate.P1.matrix.tolist(),
            P2=candidate.P2.matrix.tolist(),
            plane=np.asarray(candidate.plane).tolist(),
            front_votes_camera1=solution.votes.front1[k],
            front_votes_camera2=solution.votes.front2[k],
        )
        for k, candidate in enumerate(solution.oriented)
    ]
    checks = [
        GeometryCheckReport(name=c.name, value=c.value, tolerance=c.tolerance, passed=c.passed)
        for c in run.geometry.checks
    ]
    return PairSolutionReport(
        f1=solution.f1,
        f2=solution.f2,
        chosen=solution.chosen,
        block_scale=solution.block_scale,
        forward_f2=solution.forward_f2,
        reverse_f1=solution.reverse_f1,
        consistent=solution.consistent,
        coordinate_scale=solution.coordinate_scale,
        inliers=int(np.count_nonzero(run.inliers)),
        correspondences=n_correspondences,
        candidates=candidates,
        geometry_checks=checks,
        rotation=None if solution.rotation is None else solution.rotation.tolist(),
        translation=None if solution.translation is None else solution.translation.tolist(),
    )


def calibrate_pair_command(request: CalibratePairRequest) -> PairSolutionReport:
    """Read a match file, solve the pair and optionally save the JSON report"""
    corrs = read_match_file(request.matches)
    if len(corrs) < MIN_CORRESPONDENCES:
        raise PreconditionError(
            f"{request.matches} has {len(corrs)} matches; at least {MIN_CORRESPONDENCES} are needed"
        )
    service = SelfCalibrationService(
        ransac_iters=request.ransac_iters,
        sampson_thresh=request.sampson_thresh,
        consistency_tol=request.consistency_tol,
    )
    run = service.calibrate(corrs, seed=request.seed, use_ransac=request.use_ransac)
    report = build_report(run, len(corrs))
    if request.json_out is not None:
        write_model(request.json_out, report)
        logger.info("Wrote pair solution to %s", request.json_out)
    return report


def print_report(report: PairSolutionReport) -> None:
    print("📷 Pair self-calibration")
    print("=" * 50)
    print(f"Inliers: {report.inliers} / {report.correspondences}")
    print(f"f1 = {report.f1:.6f}")
    print(f"f2 = {report.f2:.6f}")
    status = "✅" if report.consistent else "⚠️"
    print(f"{status} Reverse solve: f1 = {report.reverse_f1:.6f}, forward f2 = {report.forward_f2:.6f}")
    for k, candidate in enumerate(report.candidates):
        print(
            f"Candidate {k}: front votes camera 1 = {candidate.front_votes_camera1}, "
            f"camera 2 = {candidate.front_votes_camera2}"
        )
    if report.chosen is None:
        print("❌ Cheirality could not decide between the candidates")
    else:
        print(f"✅ Chosen candidate: {report.chosen}")
    for check in report.geometry_checks:
        mark = "✅" if check.passed else "❌"
        print(f"{mark} {check.name}: {check.value:.3g}")


def add_parser(subparsers, settings) -> None:
    parser = subparsers.add_parser("calibrate-pair", help="Self-calibrate a camera pair from matches")
    parser.add_argument("matches", type=Path, help="Match CSV file")
    parser.add_argument("--ransac-iters", type=int, default=settings.ransac_iters)
    parser.add_argument("--sampson-thresh", type=float, default=settings.sampson_thresh)
    parser.add_argument("--seed", type=int, default=settings.seed)
    parser.add_argument("--consistency-tol", type=float, default=settings.consistency_tol)
    parser.add_argument("--no-ransac", action="store_true", help="Use every match for the eight-point fit")
    parser.add_argument("--json-out", type=Path, default=None)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    request = CalibratePairRequest(
        matches=args.matches,
        ransac_iters=args.ransac_iters,
        sampson_thresh=args.sampson_thresh,
        seed=args.seed,
        consistency_tol=args.consistency_tol,
        use_ransac=not args.no_ransac,
        json_out=args.json_out,
    )
    print_report(calibrate_pair_command(request))
    return 0

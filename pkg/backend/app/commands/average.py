"""average: register a rotation graph or select focal lengths from a pool"""

import argparse
import logging
from pathlib import Path
from typing import Optional, Union

from pydantic import BaseModel, Field, model_validator

from ..models.schemas import FocalAverageReport, FocalSelection, RotationAverageReport
from ..services.averaging import FOCAL_METHODS, AveragingService, delta_f, geodesic_distance
from ..services.file_formats import read_focal_pool, read_rotation_graph, write_model

logger = logging.getLogger(__name__)


class AverageRequest(BaseModel):
    rotations: Optional[Path] = None
    focal: Optional[Path] = None
    method: str = "jcc"
    beta: float = Field(default=0.10, gt=0)
    sweeps: int = Field(default=20, ge=0)
    json_out: Optional[Path] = None

    @model_validator(mode="after")
    def check_input(self):
        if (self.rotations is None) == (self.focal is None):
            raise ValueError("give exactly one of --rotations and --focal")
        if self.method not in FOCAL_METHODS:
            raise ValueError(f"method must be one of {', '.join(FOCAL_METHODS)}")
        return self


def average_rotations(request: AverageRequest) -> RotationAverageReport:
    graph, truth = read_rotation_graph(request.rotations)
    service = AveragingService(beta=request.beta, sweeps=request.sweeps)
    rotations = service.register(graph)

    errors = None
    if truth is not None:
        # compare in the gauge where the anchor node has identity rotation
        anchor = min(graph.nodes)
        to_anchor = truth[anchor].T
        errors = {
            node: geodesic_distance(R, truth[node] @ to_anchor) for node, R in rotations.items()
        }
    return RotationAverageReport(
        sweeps=request.sweeps,
        rotations={node: R.reshape(-1).tolist() for node, R in sorted(rotations.items())},
        errors_deg=errors,
    )


def average_focal(request: AverageRequest) -> FocalAverageReport:
    pool = read_focal_pool(request.focal)
    service = AveragingService(beta=request.beta, sweeps=request.sweeps)
    selected = service.select_all(pool, request.method)
    selections = [
        FocalSelection(
            image=image,
            f=f,
            delta_f=delta_f(f, pool.truth[image]) if image in pool.truth else None,
        )
        for image, f in selected.items()
    ]
    return FocalAverageReport(method=request.method, beta=request.beta, selections=selections)


def average_command(request: AverageRequest) -> Union[RotationAverageReport, FocalAverageReport]:
    if request.rotations is not None:
        report = average_rotations(request)
    else:
        report = average_focal(request)
    if request.json_out is not None:
        write_model(request.json_out, report)
        logger.info("Wrote averaged estimates to %s", request.json_out)
    return report


def print_report(report: Union[RotationAverageReport, FocalAverageReport]) -> None:
    print("📐 Averaging")
    print("=" * 50)
    if isinstance(report, RotationAverageReport):
        print(f"Registered {len(report.rotations)} rotations in {report.sweeps} sweeps")
        if report.errors_deg:
            worst = max(report.errors_deg.values())
            print(f"Largest node error: {worst:.6g} deg")
        return
    print(f"Method: {report.method} (beta = {report.beta})")
    for sel in report.selections:
        line = f"image {sel.image}: f = {sel.f:.4f}"
        if sel.delta_f is not None:
            line += f"  (delta f = {sel.delta_f:.4f})"
        print(line)


def add_parser(subparsers, settings) -> None:
    parser = subparsers.add_parser("average", help="Consolidate pairwise rotations or focal lengths")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--rotations", type=Path, help="Rotation graph JSON")
    source.add_argument("--focal", type=Path, help="Focal estimate pool JSON")
    parser.add_argument("--method", choices=FOCAL_METHODS, default="jcc")
    parser.add_argument("--beta", type=float, default=settings.focal_beta)
    parser.add_argument("--sweeps", type=int, default=settings.registration_sweeps)
    parser.add_argument("--json-out", type=Path, default=None)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    request = AverageRequest(
        rotations=args.rotations,
        focal=args.focal,
        method=args.method,
        beta=args.beta,
        sweeps=args.sweeps,
        json_out=args.json_out,
    )
    print_report(average_command(request))
    return 0

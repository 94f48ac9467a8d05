"""verify-matches: recursive order-consistency filtering of a match file"""

import argparse
import logging
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, Field

from ..services.file_formats import read_match_file, write_match_file
from ..services.match_verification import MatchVerificationService

logger = logging.getLogger(__name__)


class VerifyMatchesRequest(BaseModel):
    matches: Path
    alpha: float = Field(ge=0, lt=1)
    min_region: float = Field(gt=0)
    out: Optional[Path] = None

    @property
    def output_path(self) -> Path:
        if self.out is not None:
            return self.out
        return self.matches.with_name(f"{self.matches.stem}.verified.csv")


class StageSummary(BaseModel):
    depth: int
    y_range: List[float]
    n_input: int
    n_after_x: int
    n_after_y: int


class VerifyMatchesResponse(BaseModel):
    total: int
    kept: int
    out: str
    operations: int
    stages: List[StageSummary]
    precision: Optional[float] = None
    recall: Optional[float] = None


def verify_matches_command(request: VerifyMatchesRequest) -> VerifyMatchesResponse:
    """Filter the matches and write the survivors in their original order"""
    corrs = read_match_file(request.matches)
    service = MatchVerificationService(alpha=request.alpha, min_region=request.min_region)
    subset, metrics = service.verify(corrs)

    output = request.output_path
    write_match_file(output, corrs.subset(subset.indices))
    logger.info("Wrote %d verified matches to %s", len(subset.indices), output)

    precision, recall = metrics if metrics is not None else (None, None)
    return VerifyMatchesResponse(
        total=len(corrs),
        kept=len(subset.indices),
        out=str(output),
        operations=subset.operations,
        stages=[
            StageSummary(
                depth=stage.depth,
                y_range=list(stage.y_range),
                n_input=stage.n_input,
                n_after_x=stage.n_after_x,
                n_after_y=stage.n_after_y,
            )
            for stage in subset.stages
        ],
        precision=precision,
        recall=recall,
    )


def print_response(response: VerifyMatchesResponse) -> None:
    print("🔍 Match verification")
    print("=" * 50)
    for stage in response.stages:
        lo, hi = stage.y_range
        print(
            f"{'  ' * stage.depth}region [{lo:.1f}, {hi:.1f}]: "
            f"{stage.n_input} -> x {stage.n_after_x} -> y {stage.n_after_y}"
        )
    print(f"✅ Kept {response.kept} of {response.total} matches -> {response.out}")
    if response.precision is not None:
        print(f"Precision: {response.precision:.4f}")
        print(f"Recall:    {response.recall:.4f}")


def add_parser(subparsers, settings) -> None:
    parser = subparsers.add_parser("verify-matches", help="Remove matches that break the spatial order")
    parser.add_argument("matches", type=Path, help="Match CSV file")
    parser.add_argument("--alpha", type=float, default=settings.verify_alpha)
    parser.add_argument("--min-region", type=float, default=settings.min_region)
    parser.add_argument("--out", type=Path, default=None, help="Defaults to <stem>.verified.csv")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    request = VerifyMatchesRequest(
        matches=args.matches, alpha=args.alpha, min_region=args.min_region, out=args.out
    )
    print_response(verify_matches_command(request))
    return 0

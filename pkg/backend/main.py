"""
PairCalib command line.

    python main.py calibrate-pair matches.csv --json-out pair.json
    python main.py verify-matches matches.csv --alpha 0.02
    python main.py average --focal pool.json --method jcc
    python main.py eval --sigma-grid 0,0.5,1 --trials 20 --out bench.csv
    python main.py synth --points 200 --out matches.csv --cameras-out cams.json
"""

import argparse
import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from app import __version__
from app.commands import register_all
from app.errors import InputOutputError, PairCalibError, PreconditionError
from app.services import list_all_methods
from config import settings

logger = logging.getLogger("paircalib")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paircalib",
        description="Self-calibration of camera pairs with unknown, different focal lengths",
    )
    methods = ", ".join(list_all_methods())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({methods})")
    subparsers = parser.add_subparsers(dest="command", required=True)
    register_all(subparsers, settings)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad flags and 0 for --help / --version
        return int(exc.code or 0)

    logging.basicConfig(
        level=settings.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        return args.handler(args)
    except ValidationError as exc:
        print(f"❌ Invalid arguments: {exc}", file=sys.stderr)
        return PreconditionError.exit_code
    except PairCalibError as exc:
        print(f"❌ {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"❌ I/O error: {exc}", file=sys.stderr)
        return InputOutputError.exit_code


if __name__ == "__main__":
    sys.exit(main())

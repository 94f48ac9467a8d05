"""
Command-line subcommands. Each module validates its flags into a pydantic
request, calls the matching service and prints a short report.
"""

from . import average, benchmark, calibrate, verify


def register_all(subparsers, settings) -> None:
    calibrate.add_parser(subparsers, settings)
    verify.add_parser(subparsers, settings)
    average.add_parser(subparsers, settings)
    benchmark.add_parsers(subparsers, settings)


__all__ = ["average", "benchmark", "calibrate", "verify", "register_all"]

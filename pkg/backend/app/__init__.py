"""
PairCalib Package

Two-view self-calibration and its supporting tools:
- Linear recovery of two different focal lengths from a fundamental matrix
- Metric upgrade with cheirality selection between the two mirror solutions
- Order-consistency verification of tentative point matches
- L1 rotation averaging and confidence-count focal length selection
- Synthetic scenes and the noise benchmark
"""

__version__ = "1.0.0"
__author__ = "PairCalib Team"

from .errors import (
    DegenerateConfigurationError,
    InputOutputError,
    PairCalibError,
    ParseError,
    PreconditionError,
    StructureViolationError,
)
from .models.correspondences import CorrespondenceSet, ImageInfo
from .models.geometry import CameraMatrix, CameraRole
from .services.self_calibration import PairSolution, calibrate_pair

__all__ = [
    # Errors
    "PairCalibError",
    "ParseError",
    "PreconditionError",
    "DegenerateConfigurationError",
    "StructureViolationError",
    "InputOutputError",

    # Core types
    "CameraMatrix",
    "CameraRole",
    "CorrespondenceSet",
    "ImageInfo",
    "PairSolution",
    "calibrate_pair",

    # Package metadata
    "__version__",
    "__author__",
]

PACKAGE_NAME = "PairCalib"
DESCRIPTION = "Self-calibration of camera pairs with unknown, different focal lengths"
SUPPORTED_METHODS = [
    "Eight-point F",
    "RANSAC F",
    "Linear DIAC self-calibration",
    "Thresholded LIS verification",
    "Weiszfeld rotation averaging",
    "cc / Jcc focal selection",
]


def get_package_info():
    """Get package information"""
    return {
        "name": PACKAGE_NAME,
        "version": __version__,
        "description": DESCRIPTION,
        "author": __author__,
        "supported_methods": SUPPORTED_METHODS,
    }

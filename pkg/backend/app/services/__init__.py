"""
Services Package

- Geometry: homogeneous primitives, camera centres and K/R/C decomposition
- Epipolar: eight-point and RANSAC fundamental matrices, epipoles, canonical cameras
- Self Calibration: the linear two-focal solve, metric candidates and cheirality
- Match Verification: order-consistency filtering with thresholded LIS
- Averaging: rotation registration and focal length selection
- Synthetic: ground-truth scenes, fixtures and the noise benchmark
- File Formats: match, camera, graph, pool and report files
"""

from . import (
    averaging,
    epipolar,
    file_formats,
    geometry,
    match_verification,
    self_calibration,
    synthetic,
)

__all__ = [
    "geometry",
    "epipolar",
    "self_calibration",
    "match_verification",
    "averaging",
    "synthetic",
    "file_formats",
]

# Service metadata
AVAILABLE_SERVICES = {
    "self_calibration": {
        "name": "Pair Self-Calibration",
        "description": "Recover f1, f2 and the metric camera pair from F",
        "methods": ["Linear DIAC", "Bidirectional solve", "Cheirality vote"],
        "input_types": ["match_csv", "fundamental_matrix"],
    },
    "match_verification": {
        "name": "Match Verification",
        "description": "Keep matches whose x and y order agrees between the images",
        "methods": ["Thresholded LIS", "Recursive regions"],
        "input_types": ["match_csv"],
    },
    "averaging": {
        "name": "Averaging",
        "description": "Consolidate pairwise rotations and focal lengths",
        "methods": ["Weiszfeld", "median", "cc", "jcc"],
        "input_types": ["rotation_graph_json", "focal_pool_json"],
    },
    "synthetic": {
        "name": "Synthetic Benchmark",
        "description": "Noise sweep over random camera pairs with known truth",
        "methods": ["Monte Carlo"],
        "input_types": ["sigma_grid"],
    },
}


def get_service_info(service_name: str = None):
    """Get information about available services"""
    if service_name:
        return AVAILABLE_SERVICES.get(service_name)
    return AVAILABLE_SERVICES


def list_all_methods():
    """Get a list of all methods used across services"""
    methods = []
    for info in AVAILABLE_SERVICES.values():
        methods.extend(info["methods"])
    return sorted(set(methods))

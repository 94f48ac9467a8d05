import os
from typing import Callable, TypeVar
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

T = TypeVar("T")


def _read(name: str, default: str, cast: Callable[[str], T]) -> T:
    raw = os.getenv(name, default)
    try:
        return cast(raw)
    except (TypeError, ValueError):
        raise ValueError(f"Invalid value for {name}: {raw!r}")


class PairCalibConfig:
    """Solver and command defaults, read from the environment"""

    def __init__(self):
        self.seed = _read("SEED", "0", int)
        self.ransac_iters = _read("RANSAC_ITERS", "1000", int)
        self.sampson_thresh = _read("SAMPSON_THRESH", "1.0", float)
        self.verify_alpha = _read("VERIFY_ALPHA", "0.02", float)
        self.min_region = _read("MIN_REGION", "200", float)
        self.focal_beta = _read("FOCAL_BETA", "0.10", float)
        self.registration_sweeps = _read("REGISTRATION_SWEEPS", "20", int)
        self.consistency_tol = _read("CONSISTENCY_TOL", "0.01", float)
        self.log_level = os.getenv("LOG_LEVEL", "INFO").upper()
        self.validate()

    def validate(self) -> None:
        """Reject values no command could run with"""

        if self.ransac_iters < 0:
            raise ValueError("RANSAC_ITERS must be non-negative")
        if self.sampson_thresh <= 0:
            raise ValueError("SAMPSON_THRESH must be positive")
        if not 0 <= self.verify_alpha < 1:
            raise ValueError("VERIFY_ALPHA must lie in [0, 1)")
        if self.min_region <= 0:
            raise ValueError("MIN_REGION must be positive")
        if self.focal_beta <= 0:
            raise ValueError("FOCAL_BETA must be positive")
        if self.registration_sweeps < 0:
            raise ValueError("REGISTRATION_SWEEPS must be non-negative")
        if self.consistency_tol <= 0:
            raise ValueError("CONSISTENCY_TOL must be positive")
        if self.log_level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"Unsupported LOG_LEVEL: {self.log_level}")

# Global configuration instance
settings = PairCalibConfig()

# Environment variables template (copy to .env file)
ENV_TEMPLATE = """
# PairCalib Configuration - Copy to .env file

# Default RNG seed for every command (--seed overrides it)
SEED=0

# Robust fundamental matrix estimation
RANSAC_ITERS=1000
SAMPSON_THRESH=1.0

# Match verification: threshold coefficient and recursion cutoff (px)
VERIFY_ALPHA=0.02
MIN_REGION=200

# Averaging: focal range fraction and registration sweeps
FOCAL_BETA=0.10
REGISTRATION_SWEEPS=20

# Allowed relative disagreement between forward and reverse focal estimates
CONSISTENCY_TOL=0.01

# DEBUG, INFO, WARNING, ERROR
LOG_LEVEL=INFO
"""

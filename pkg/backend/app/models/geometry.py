from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from ..errors import PreconditionError

# 3x3 rank-2 epipolar map, 4x4 symmetric dual quadric and 3x3 rotation are
# plain arrays; the aliases document intent at call sites.
FundamentalMatrix = np.ndarray
DualQuadric = np.ndarray
RotationMatrix = np.ndarray


class CameraRole(str, Enum):
    PROJECTIVE = "projective"
    METRIC = "metric"


@dataclass(frozen=True)
class CameraMatrix:
    """3x4 homogeneous projection, defined up to scale"""

    matrix: np.ndarray
    role: CameraRole = CameraRole.PROJECTIVE

    def __post_init__(self):
        arr = np.asarray(self.matrix, dtype=float)
        if arr.shape != (3, 4):
            raise PreconditionError(f"Camera matrix must be 3x4, got {arr.shape}")
        object.__setattr__(self, "matrix", arr)

    @property
    def left(self) -> np.ndarray:
        return self.matrix[:, :3]

    @property
    def translation(self) -> np.ndarray:
        return self.matrix[:, 3]

    def scaled(self, factor: float) -> "CameraMatrix":
        return CameraMatrix(self.matrix * factor, self.role)


CameraLike = Union[CameraMatrix, np.ndarray]


def as_camera_array(P: CameraLike) -> np.ndarray:
    if isinstance(P, CameraMatrix):
        return P.matrix
    arr = np.asarray(P, dtype=float)
    if arr.shape != (3, 4):
        raise PreconditionError(f"Camera matrix must be 3x4, got {arr.shape}")
    return arr


@dataclass(frozen=True)
class Epipoles:
    """Unit null vectors of F: F e = 0 and F^T a = 0"""

    e: np.ndarray
    a: np.ndarray

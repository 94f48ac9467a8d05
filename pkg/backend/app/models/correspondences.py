from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from ..errors import PreconditionError


@dataclass(frozen=True)
class ImageInfo:
    """Image identifier and optional size in pixels"""

    id: str = ""
    width: Optional[float] = None
    height: Optional[float] = None


@dataclass(frozen=True)
class CorrespondenceSet:
    """
    Tentative point matches between two images.

    Coordinates are pixels with the principal point at the origin, stored as
    (n, 2) arrays. ``labels`` marks ground-truth inliers when known.
    """

    x1: np.ndarray
    x2: np.ndarray
    labels: Optional[np.ndarray] = None
    image1: ImageInfo = field(default_factory=ImageInfo)
    image2: ImageInfo = field(default_factory=ImageInfo)

    def __post_init__(self):
        x1 = np.asarray(self.x1, dtype=float).reshape(-1, 2)
        x2 = np.asarray(self.x2, dtype=float).reshape(-1, 2)
        if x1.shape != x2.shape:
            raise PreconditionError(
                f"Point lists differ in length: {len(x1)} vs {len(x2)}"
            )
        if not (np.all(np.isfinite(x1)) and np.all(np.isfinite(x2))):
            raise PreconditionError("Correspondences must have finite coordinates")
        object.__setattr__(self, "x1", x1)
        object.__setattr__(self, "x2", x2)
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=bool).reshape(-1)
            if len(labels) != len(x1):
                raise PreconditionError("One label is required per correspondence")
            object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.x1)

    @property
    def has_labels(self) -> bool:
        return self.labels is not None

    def homogeneous1(self) -> np.ndarray:
        return np.column_stack([self.x1, np.ones(len(self))])

    def homogeneous2(self) -> np.ndarray:
        return np.column_stack([self.x2, np.ones(len(self))])

    def subset(self, indices: Sequence[int]) -> "CorrespondenceSet":
        idx = np.asarray(indices, dtype=int)
        labels = None if self.labels is None else self.labels[idx]
        return replace(self, x1=self.x1[idx], x2=self.x2[idx], labels=labels)

    def swapped(self) -> "CorrespondenceSet":
        """The same matches with the image order exchanged"""
        return replace(
            self, x1=self.x2, x2=self.x1, image1=self.image2, image2=self.image1
        )

"""
Geometric verification of tentative matches by order consistency.

Matches that keep their left-right order (and, separately, their down-up
order) in both images are selected as a longest non-decreasing subsequence
with slack T: consecutive kept values may drop by at most T.
"""

import logging
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sklearn.metrics import precision_score, recall_score

from ..errors import PreconditionError
from ..models.correspondences import CorrespondenceSet

logger = logging.getLogger(__name__)


class OperationCounter:
    """
    Work done by the thresholded LIS: probes made by each binary search over
    the tail runs, and tail runs removed when a new value overwrites them.
    """

    def __init__(self):
        self.probes = 0
        self.moves = 0

    def searched(self, size: int) -> None:
        self.probes += size.bit_length()

    def moved(self, n: int) -> None:
        self.moves += n

    @property
    def count(self) -> int:
        return self.probes + self.moves


def lis_thresholded(
    seq: Sequence[float], T: float = 0.0, counter: Optional[OperationCounter] = None
) -> List[int]:
    """
    Indices of a longest subsequence with s[i] - T <= s[next] throughout.

    Patience sorting generalized to slack T. ``tails[k]`` is the smallest last
    value over valid chains of length k + 1; it is non-decreasing, so it is
    stored as runs of equal value (value, last length covered, element) and
    searched with bisect. A new value u extends every length whose tail is at
    most u + T and becomes the tail of each length up to its own whose tail
    exceeds u. Equal values never displace an existing tail.
    """
    values: List[float] = []
    ends: List[int] = []
    elems: List[int] = []
    pred = [-1] * len(seq)

    for idx, u in enumerate(seq):
        if counter is not None:
            counter.searched(len(values))
            counter.searched(len(values))
        k = bisect_right(values, u + T)
        reach = ends[k - 1] if k else 0
        pred[idx] = elems[k - 1] if k else -1
        length = reach + 1

        lo = bisect_right(values, u)
        covered = ends[lo - 1] if lo else 0
        if covered >= length:
            continue
        hi = bisect_right(ends, length)
        if counter is not None:
            counter.searched(len(ends))
            counter.moved(hi - lo)
        values[lo:hi] = [u]
        ends[lo:hi] = [length]
        elems[lo:hi] = [idx]

    if not elems:
        return []
    chain = []
    node = elems[-1]
    while node != -1:
        chain.append(node)
        node = pred[node]
    return chain[::-1]


def order_consistent(primary: np.ndarray, secondary: np.ndarray, T: float) -> bool:
    """Relaxed order check: sorted by primary, secondary never drops by more than T"""
    if len(primary) < 2:
        return True
    order = np.lexsort((secondary, primary))
    return bool(np.all(np.diff(secondary[order]) >= -T))


def _consistent_axis(
    first: np.ndarray,
    second: np.ndarray,
    T: float,
    counter: Optional[OperationCounter] = None,
) -> np.ndarray:
    order = np.lexsort((second, first))
    keep = lis_thresholded(second[order].tolist(), T, counter)
    return np.sort(order[keep])


def consistent_x(
    corrs: CorrespondenceSet, T: float = 0.0, counter: Optional[OperationCounter] = None
) -> List[int]:
    """Largest subset whose x order agrees between the images, within slack T"""
    if len(corrs) == 0:
        return []
    return _consistent_axis(corrs.x1[:, 0], corrs.x2[:, 0], T, counter).tolist()


def _y_pass(
    corrs: CorrespondenceSet,
    kept_x: Sequence[int],
    Ty: float,
    counter: Optional[OperationCounter] = None,
) -> List[int]:
    kept_x = np.asarray(kept_x, dtype=int)
    if len(kept_x) == 0:
        return []
    kept_y = _consistent_axis(corrs.x1[kept_x, 1], corrs.x2[kept_x, 1], Ty, counter)
    return kept_x[kept_y].tolist()


def consistent_xy(
    corrs: CorrespondenceSet,
    Tx: float = 0.0,
    Ty: float = 0.0,
    counter: Optional[OperationCounter] = None,
) -> List[int]:
    """x pass followed by a y pass over its survivors (greedy, not jointly optimal)"""
    return _y_pass(corrs, consistent_x(corrs, Tx, counter), Ty, counter)


@dataclass(frozen=True)
class VerificationConfig:
    alpha: float = 0.02
    min_region: float = 200.0

    def __post_init__(self):
        if not 0 <= self.alpha < 1:
            raise PreconditionError(f"alpha must lie in [0, 1), got {self.alpha}")
        if not self.min_region > 0:
            raise PreconditionError(f"min_region must be positive, got {self.min_region}")


@dataclass(frozen=True)
class RegionStage:
    depth: int
    y_range: Tuple[float, float]
    n_input: int
    n_after_x: int
    n_after_y: int
    tx: float
    ty: float


@dataclass
class VerifiedSubset:
    indices: List[int]
    stages: List[RegionStage] = field(default_factory=list)
    operations: int = 0

    @property
    def depth(self) -> int:
        return max((stage.depth for stage in self.stages), default=0)

    @property
    def after_x(self) -> int:
        return self.stages[0].n_after_x if self.stages else 0

    @property
    def after_y(self) -> int:
        return self.stages[0].n_after_y if self.stages else 0


def _extent(values: np.ndarray) -> float:
    return float(values.max() - values.min()) if len(values) else 0.0


def recursive_verify(corrs: CorrespondenceSet, cfg: VerificationConfig) -> VerifiedSubset:
    """
    Verify the whole image, then split the survivors at their median image-1 y
    into two regions with equal counts and verify each again, until a region
    is shorter than ``cfg.min_region`` or holds fewer than two matches.

    Each region uses its own slack: the x pass takes alpha times the y extent
    of its image-1 points and the y pass alpha times their x extent.
    """
    result = VerifiedSubset(indices=[])
    if len(corrs) == 0:
        return result

    height = corrs.image1.height
    if height:
        region = (-0.5 * height, 0.5 * height)
    else:
        region = (float(corrs.x1[:, 1].min()), float(corrs.x1[:, 1].max()))
    logger.info(
        "Verification slack uses the y extent for the x pass and the x extent for the y pass"
    )

    counter = OperationCounter()
    leaves: List[np.ndarray] = []
    stack = [(np.arange(len(corrs)), region, 0)]
    while stack:
        idx, (lo, hi), depth = stack.pop()
        sub = corrs.subset(idx)
        tx = cfg.alpha * _extent(sub.x1[:, 1])
        ty = cfg.alpha * _extent(sub.x1[:, 0])

        kept_x = consistent_x(sub, tx, counter)
        kept = np.asarray(_y_pass(sub, kept_x, ty, counter), dtype=int)
        survivors = idx[kept]
        result.stages.append(
            RegionStage(depth, (lo, hi), len(idx), len(kept_x), len(survivors), tx, ty)
        )

        if hi - lo < cfg.min_region or len(survivors) < 2:
            leaves.append(survivors)
            continue

        ys = corrs.x1[survivors, 1]
        order = np.lexsort((survivors, ys))
        n_lower = (len(order) + 1) // 2
        lower, upper = survivors[order[:n_lower]], survivors[order[n_lower:]]
        split = 0.5 * (ys[order[n_lower - 1]] + ys[order[n_lower]])
        # upper pushed first so the lower region is processed first
        stack.append((np.sort(upper), (split, hi), depth + 1))
        stack.append((np.sort(lower), (lo, split), depth + 1))

    result.indices = sorted(int(i) for leaf in leaves for i in leaf)
    result.operations = counter.count
    logger.info(
        "Verified %d of %d matches over %d regions (depth %d)",
        len(result.indices), len(corrs), len(result.stages), result.depth,
    )
    return result


def verification_metrics(
    predicted: Sequence[int], labels: Sequence[bool]
) -> Tuple[float, float]:
    """Precision and recall of the kept set against inlier labels; NaN precision when nothing is kept"""
    y_true = np.asarray(labels, dtype=bool)
    if not y_true.any():
        raise PreconditionError("Labels contain no inliers; precision and recall are undefined")
    kept = np.asarray(predicted, dtype=int)
    if len(kept) and (kept.min() < 0 or kept.max() >= len(y_true)):
        raise PreconditionError(
            f"Kept indices must lie in [0, {len(y_true)}), got {kept.min()}..{kept.max()}"
        )
    y_pred = np.zeros(len(y_true), dtype=bool)
    y_pred[kept] = True
    precision = precision_score(y_true, y_pred, zero_division=np.nan)
    recall = recall_score(y_true, y_pred, zero_division=np.nan)
    return float(precision), float(recall)


class MatchVerificationService:
    def __init__(self, alpha: float = 0.02, min_region: float = 200.0):
        self.config = VerificationConfig(alpha=alpha, min_region=min_region)

    def verify(self, corrs: CorrespondenceSet) -> Tuple[VerifiedSubset, Optional[Tuple[float, float]]]:
        """Recursive verification plus precision/recall when labels are present"""
        subset = recursive_verify(corrs, self.config)
        metrics = None
        if corrs.has_labels and corrs.labels.any():
            metrics = verification_metrics(subset.indices, corrs.labels)
        return subset, metrics

"""
Consolidation of many pairwise estimates: L1 (Weiszfeld) rotation averaging
and confidence-count based focal length selection.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse.csgraph import breadth_first_order, minimum_spanning_tree
from scipy.spatial.transform import Rotation

from ..errors import PreconditionError

logger = logging.getLogger(__name__)

ROTATION_TOL = 1e-6
COINCIDENT_TOL = 1e-12
FOCAL_METHODS = ("median", "cc", "jcc")


def as_rotation(R) -> np.ndarray:
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        raise PreconditionError(f"Rotation must be 3x3, got {R.shape}")
    if np.linalg.norm(R.T @ R - np.eye(3)) > ROTATION_TOL or np.linalg.det(R) <= 0:
        raise PreconditionError("Matrix is not a proper rotation")
    return R


def geodesic_distance(R, S) -> float:
    """Rotation angle of R S^-1 in degrees"""
    R, S = as_rotation(R), as_rotation(S)
    return float(np.degrees(Rotation.from_matrix(R @ S.T).magnitude()))


def project_to_so3(M: np.ndarray) -> np.ndarray:
    U, _, Vt = np.linalg.svd(M)
    R = U @ Vt
    if np.linalg.det(R) < 0:
        U[:, 2] *= -1
        R = U @ Vt
    return R


def _weiszfeld_step(R: np.ndarray, rotations: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    One reweighted tangent-space step toward the L1 mean.

    Inputs coinciding with R are left out of the step; R is already optimal
    when the unit residuals of the others sum to no more than their count.
    """
    residuals = Rotation.from_matrix(rotations @ R.T).as_rotvec()
    norms = np.linalg.norm(residuals, axis=1)
    coincident = norms < COINCIDENT_TOL
    if coincident.all():
        return R, 0.0
    v, n = residuals[~coincident], norms[~coincident]
    pull = np.sum(v / n[:, None], axis=0)
    if np.linalg.norm(pull) <= coincident.sum():
        return R, 0.0
    delta = pull / np.sum(1.0 / n)
    return Rotation.from_rotvec(delta).as_matrix() @ R, float(np.linalg.norm(delta))


def weiszfeld_single(
    rotations: Sequence[np.ndarray], max_iters: int = 1000, tol: float = 1e-12
) -> np.ndarray:
    """Geodesic L1 mean, started from the projected elementwise median"""
    if len(rotations) == 0:
        raise PreconditionError("Cannot average an empty set of rotations")
    stack = np.stack([as_rotation(R) for R in rotations])
    if len(stack) == 1:
        return stack[0].copy()

    R = project_to_so3(np.median(stack, axis=0))
    for _ in range(max_iters):
        R, step = _weiszfeld_step(R, stack)
        if step < tol:
            break
    return project_to_so3(R)


@dataclass(frozen=True)
class RotationEdge:
    """Relative rotation with R_j = rotation @ R_i"""

    i: int
    j: int
    rotation: np.ndarray


@dataclass
class RotationGraph:
    nodes: List[int] = field(default_factory=list)
    edges: List[RotationEdge] = field(default_factory=list)

    def add_edge(self, i: int, j: int, rotation) -> None:
        self.edges.append(RotationEdge(i, j, as_rotation(rotation)))

    def adjacency(self) -> Dict[int, List[Tuple[int, np.ndarray]]]:
        """node -> [(neighbour, T)] with R_node estimated as T @ R_neighbour"""
        known = set(self.nodes)
        adj: Dict[int, List[Tuple[int, np.ndarray]]] = {n: [] for n in self.nodes}
        for edge in self.edges:
            if edge.i not in known or edge.j not in known:
                raise PreconditionError(f"Edge ({edge.i}, {edge.j}) references an unknown node")
            adj[edge.j].append((edge.i, edge.rotation))
            adj[edge.i].append((edge.j, edge.rotation.T))
        for node in adj:
            adj[node].sort(key=lambda item: item[0])
        return adj


def _relative_lookup(graph: RotationGraph) -> Dict[Tuple[int, int], np.ndarray]:
    """(a, b) -> T with R_b = T @ R_a; the first edge between two nodes wins"""
    rel: Dict[Tuple[int, int], np.ndarray] = {}
    for edge in graph.edges:
        rel.setdefault((edge.i, edge.j), edge.rotation)
        rel.setdefault((edge.j, edge.i), edge.rotation.T)
    return rel


def cycle_inconsistency(graph: RotationGraph) -> Dict[Tuple[int, int], float]:
    """
    Median angle, in degrees, by which the triangles through each edge fail
    to close. Keys are (smaller node, larger node). An edge that lies in no
    triangle cannot be checked and scores 180.
    """
    adj = graph.adjacency()
    rel = _relative_lookup(graph)
    neighbours = {node: {nb for nb, _ in items} for node, items in adj.items()}
    pairs = sorted({(min(e.i, e.j), max(e.i, e.j)) for e in graph.edges if e.i != e.j})

    weights: Dict[Tuple[int, int], float] = {}
    for i, j in pairs:
        common = sorted(neighbours[i] & neighbours[j] - {i, j})
        if not common:
            weights[(i, j)] = 180.0
            continue
        back = rel[(i, j)].T
        loops = np.stack([rel[(k, j)] @ rel[(i, k)] @ back for k in common])
        weights[(i, j)] = float(np.median(np.degrees(Rotation.from_matrix(loops).magnitude())))
    return weights


def spanning_tree_init(graph: RotationGraph) -> Dict[int, np.ndarray]:
    """
    Propagation from the smallest node, anchored at identity, along the
    spanning tree of least cycle inconsistency.
    """
    if not graph.nodes:
        raise PreconditionError("Rotation graph has no nodes")
    nodes = sorted(set(graph.nodes))
    index = {node: k for k, node in enumerate(nodes)}

    W = np.zeros((len(nodes), len(nodes)))
    for (i, j), weight in cycle_inconsistency(graph).items():
        # csgraph reads a zero entry as a missing edge
        W[index[i], index[j]] = 1.0 + weight
    tree = minimum_spanning_tree(W)
    order, parents = breadth_first_order(tree, 0, directed=False, return_predecessors=True)
    if len(order) != len(nodes):
        reached = {nodes[k] for k in order}
        missing = [node for node in nodes if node not in reached]
        raise PreconditionError(f"Rotation graph is disconnected; unreachable nodes {missing}")

    rel = _relative_lookup(graph)
    rotations = {nodes[0]: np.eye(3)}
    for k in order[1:]:
        parent, node = nodes[parents[k]], nodes[k]
        rotations[node] = rel[(parent, node)] @ rotations[parent]
    return rotations


def register_rotations(graph: RotationGraph, sweeps: int = 20) -> Dict[int, np.ndarray]:
    """
    Absolute rotations up to a global rotation, smallest node fixed to I.

    Every sweep moves each other node by one Weiszfeld step toward the
    estimates its neighbours imply, all computed from the previous sweep.
    """
    rotations = spanning_tree_init(graph)
    adj = graph.adjacency()
    anchor = min(graph.nodes)
    for _ in range(sweeps):
        updated = {anchor: rotations[anchor]}
        for node, neighbours in adj.items():
            if node == anchor:
                continue
            estimates = np.stack([T @ rotations[nb] for nb, T in neighbours])
            updated[node], _ = _weiszfeld_step(rotations[node], estimates)
        rotations = updated
    return rotations


def graph_residual(graph: RotationGraph, rotations: Dict[int, np.ndarray]) -> float:
    """Summed disagreement, in degrees, between edges and absolute rotations"""
    return sum(
        geodesic_distance(edge.rotation @ rotations[edge.i], rotations[edge.j])
        for edge in graph.edges
    )


def confidence_counts(estimates: Sequence[float], beta: float = 0.10) -> np.ndarray:
    """
    For each estimate, the number of estimates within beta of it (itself
    included), divided by the largest such count.
    """
    if beta <= 0:
        raise PreconditionError(f"beta must be positive, got {beta}")
    f = np.asarray(estimates, dtype=float)
    if len(f) == 0:
        return f
    within = np.abs(f[None, :] - f[:, None]) <= beta * f[:, None]
    counts = within.sum(axis=1)
    return counts / counts.max()


@dataclass(frozen=True)
class FocalEntry:
    f: float
    partner: int
    partner_f: float
    pair_id: str
    # position of the mirrored entry in the partner image's list
    partner_index: int


@dataclass
class FocalEstimatePool:
    """Per-image focal estimates, each tied to the partner estimate from the same pair solve"""

    entries: Dict[int, List[FocalEntry]] = field(default_factory=lambda: defaultdict(list))
    truth: Dict[int, float] = field(default_factory=dict)

    def add_pair_estimate(self, pair_id: str, i: int, j: int, f_i: float, f_j: float) -> None:
        if i == j:
            raise PreconditionError("A pair estimate needs two distinct images")
        if not (f_i > 0 and f_j > 0):
            raise PreconditionError(f"Focal estimates must be positive, got {f_i}, {f_j}")
        at_i, at_j = len(self.entries[i]), len(self.entries[j])
        self.entries[i].append(FocalEntry(float(f_i), j, float(f_j), pair_id, at_j))
        self.entries[j].append(FocalEntry(float(f_j), i, float(f_i), pair_id, at_i))

    def add_pair_samples(
        self, pair_id: str, i: int, j: int, samples: Sequence[Tuple[float, float]]
    ) -> None:
        """Every (f_i, f_j) sample of one pair, all under the same pair id"""
        for f_i, f_j in samples:
            self.add_pair_estimate(pair_id, i, j, f_i, f_j)

    @property
    def images(self) -> List[int]:
        return sorted(self.entries)

    def values(self, image: int) -> np.ndarray:
        return np.array([entry.f for entry in self.entries.get(image, [])])


def joint_confidence(pool: FocalEstimatePool, image: int, beta: float = 0.10) -> np.ndarray:
    """
    Jcc for each estimate of ``image``: for every partner image k, the mean
    cc (within k's pool) of the partners of this image's in-range estimates
    from pairs with k, summed over k.
    """
    entries = pool.entries.get(image, [])
    values = pool.values(image)
    partners = sorted({entry.partner for entry in entries})
    cc = {k: confidence_counts(pool.values(k), beta) for k in partners}

    scores = np.zeros(len(entries))
    for n, f_n in enumerate(values):
        in_range = np.abs(values - f_n) <= beta * f_n
        for k in partners:
            support = [
                cc[k][entry.partner_index]
                for entry, ok in zip(entries, in_range)
                if ok and entry.partner == k
            ]
            if support:
                scores[n] += float(np.mean(support))
    return scores


def select_focal(
    pool: FocalEstimatePool, image: int, method: str = "jcc", beta: float = 0.10
) -> float:
    """Median, or the highest cc / Jcc estimate with ties going to the smaller f"""
    values = pool.values(image)
    if len(values) == 0:
        raise PreconditionError(f"No focal estimates for image {image}")
    if method == "median":
        return float(np.median(values))
    if method == "cc":
        scores = confidence_counts(values, beta)
    elif method == "jcc":
        scores = joint_confidence(pool, image, beta)
    else:
        raise PreconditionError(f"Unknown focal selection method {method!r}; use one of {FOCAL_METHODS}")
    best = scores.max()
    return float(values[scores >= best - 1e-12].min())


def delta_f(estimate: float, truth: float) -> float:
    if not truth > 0:
        raise PreconditionError(f"True focal length must be positive, got {truth}")
    return abs(estimate / truth - 1.0)


@dataclass(frozen=True)
class PairAverage:
    rotation: Optional[np.ndarray]
    f1: float
    f2: float
    samples: List[Tuple[float, float]]


def average_pair_estimates(solutions: Sequence) -> PairAverage:
    """L1 mean of the chosen relative rotations and median focal lengths of sampled solves"""
    if not solutions:
        raise PreconditionError("No pair solutions to average")
    samples = [(sol.f1, sol.f2) for sol in solutions]
    rotations = [sol.rotation for sol in solutions if sol.rotation is not None]
    rotation = weiszfeld_single(rotations) if rotations else None
    f = np.array(samples)
    return PairAverage(rotation, float(np.median(f[:, 0])), float(np.median(f[:, 1])), samples)


def pool_from_solutions(
    pairs: Mapping[Tuple[int, int], Sequence], truth: Optional[Dict[int, float]] = None
) -> FocalEstimatePool:
    """
    Focal pool fed by sampled solves: every solution of the pair (i, j)
    becomes one estimate tagged with the pair id "i-j".
    """
    pool = FocalEstimatePool(truth=dict(truth or {}))
    for (i, j), solutions in sorted(pairs.items()):
        if not solutions:
            logger.warning("Pair (%d, %d) has no solved samples; left out of the pool", i, j)
            continue
        pool.add_pair_samples(f"{i}-{j}", i, j, average_pair_estimates(solutions).samples)
    return pool


class AveragingService:
    def __init__(self, beta: float = 0.10, sweeps: int = 20):
        if beta <= 0:
            raise PreconditionError(f"beta must be positive, got {beta}")
        self.beta = beta
        self.sweeps = sweeps

    def register(self, graph: RotationGraph) -> Dict[int, np.ndarray]:
        rotations = register_rotations(graph, self.sweeps)
        logger.info(
            "Registered %d rotations; residual %.6g deg after %d sweeps",
            len(rotations), graph_residual(graph, rotations), self.sweeps,
        )
        return rotations

    def select_all(self, pool: FocalEstimatePool, method: str = "jcc") -> Dict[int, float]:
        """Selected focal length for every image in the pool"""
        return {image: select_focal(pool, image, method, self.beta) for image in pool.images}

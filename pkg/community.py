"""
Modularity, the ΔQ move gain and the multi-level Louvain family.

louvain(A) optimizes modularity on A. duo_louvain(A, M) takes candidate
communities from the neighbourhoods of A but scores every move on M.
multiple_bipolar_duo_louvain builds M from bipolar relational evidence first.
Both matrices are coarsened together between levels.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from bipolar_graph import (
    DirectBipolarGraph, ExtendedMultipleBipolarFuzzyGraph, PipelineConfig,
    PipelineResult, build_modularity_matrix
)
from errors import InputError, NumericError
from fuzzy_measure import ShapleySettings
from monitoring import detection_duration_seconds, detection_runs_total, louvain_levels, track_time
from weighted_graph import WeightedGraph

logger = logging.getLogger(__name__)

MIN_GAIN = 1e-12
CACHE_TOLERANCE = 1e-9


def canonical_labels(labels: Sequence[int]) -> np.ndarray:
    """Relabel communities 0..k-1 in order of their smallest member"""
    labels = np.asarray(labels)
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first)] = np.arange(first.size)
    return rank[inverse.reshape(-1)]


@dataclass(frozen=True, eq=False)
class Partition:
    """Node -> community assignment in canonical form"""
    assignment: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.assignment)
        if labels.ndim != 1 or labels.size < 1:
            raise InputError("A partition needs at least one node")
        if labels.dtype.kind not in 'biuf':
            raise InputError(f"Community labels must be integers, got {labels.dtype} values")
        if labels.dtype.kind == 'f' and not np.all(np.equal(np.mod(labels, 1), 0)):
            raise InputError("Community labels must be integers")
        canonical = canonical_labels(labels.astype(np.int64))
        canonical.flags.writeable = False
        object.__setattr__(self, 'assignment', canonical)

    @property
    def n(self) -> int:
        return self.assignment.size

    @property
    def k(self) -> int:
        return int(self.assignment.max()) + 1

    def communities(self) -> List[Tuple[int, ...]]:
        """Member tuples (0-based), ordered by smallest member"""
        return [tuple(int(i) for i in np.flatnonzero(self.assignment == c)) for c in range(self.k)]

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment)

    def indicator(self) -> np.ndarray:
        """n x k one-hot membership matrix"""
        P = np.zeros((self.n, self.k))
        P[np.arange(self.n), self.assignment] = 1.0
        return P

    @classmethod
    def from_communities(cls, communities: Sequence[Sequence[int]], n: int) -> 'Partition':
        labels = np.full(n, -1, dtype=np.int64)
        for label, members in enumerate(communities):
            if len(members) == 0:
                raise InputError(f"Community {label} is empty")
            for node in members:
                if node < 0 or node >= n:
                    raise InputError(f"Node {node} outside 0..{n - 1}")
                if labels[node] >= 0:
                    raise InputError(f"Node {node} belongs to more than one community")
                labels[node] = label
        missing = np.flatnonzero(labels < 0)
        if missing.size:
            raise InputError(f"Nodes without a community: {missing.tolist()}")
        return cls(labels)

    @classmethod
    def singletons(cls, n: int) -> 'Partition':
        return cls(np.arange(n))

    @classmethod
    def whole(cls, n: int) -> 'Partition':
        return cls(np.zeros(n, dtype=np.int64))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.assignment, other.assignment)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Partition({self.communities()})"


def _coarsen_array(weights: np.ndarray, p: Partition) -> np.ndarray:
    P = p.indicator()
    return P.T @ weights @ P


def coarsen(M: WeightedGraph, p: Partition) -> WeightedGraph:
    """Supervertex matrix: block sums between communities, full internal weight on the diagonal"""
    if p.n != M.n:
        raise InputError(f"Partition covers {p.n} nodes, matrix has {M.n}")
    return WeightedGraph(_coarsen_array(M.weights, p))


def _modularity_array(weights: np.ndarray, p: Partition) -> float:
    total = float(weights.sum())
    if total <= 0:
        raise NumericError("Modularity is undefined for a graph with zero total weight")
    C = _coarsen_array(weights, p)
    K = C.sum(axis=1)
    return float((np.trace(C) - np.dot(K, K) / total) / total)


def modularity(M: WeightedGraph, p: Partition) -> float:
    """Q = (1/2m) Σ_ij [M_ij - k_i k_j / 2m] δ(c_i, c_j)"""
    if p.n != M.n:
        raise InputError(f"Partition covers {p.n} nodes, matrix has {M.n}")
    return _modularity_array(M.weights, p)


class LouvainState:
    """Phase-1 bookkeeping for one level.

    Candidates come from A, all weights from M. Σ_in and Σ_tot are indexed
    by community label; labels start as node indices so they never exceed n-1.
    A node taken out with remove() has label -1 until insert() places it.
    """

    def __init__(self, A: np.ndarray, M: np.ndarray, min_gain: float = MIN_GAIN):
        self.A = A
        self.M = M
        self.n = M.shape[0]
        self.min_gain = min_gain
        self.total_weight = float(M.sum())
        if self.total_weight <= 0:
            raise NumericError("Cannot optimize modularity: M has zero total weight")
        self.degrees = M.sum(axis=1)
        self.loops = np.diag(M).copy()
        self.community = np.arange(self.n)
        self.sigma_tot = self.degrees.copy()
        self.sigma_in = self.loops.copy()
        self.neighbours = [
            np.flatnonzero((A[i] > 0) & (np.arange(self.n) != i)) for i in range(self.n)
        ]

    def links(self, i: int) -> np.ndarray:
        """Weight from node i to every community, self-loop excluded"""
        row = self.M[i].copy()
        row[i] = 0.0
        labels = np.where(self.community < 0, 0, self.community)
        return np.bincount(labels, weights=row, minlength=self.n)

    def remove(self, i: int, k_in: float):
        c = self.community[i]
        self.sigma_tot[c] -= self.degrees[i]
        self.sigma_in[c] -= 2.0 * k_in + self.loops[i]
        self.community[i] = -1

    def insert(self, i: int, c: int, k_in: float):
        self.sigma_tot[c] += self.degrees[i]
        self.sigma_in[c] += 2.0 * k_in + self.loops[i]
        self.community[i] = c

    def gain(self, i: int, k_in, sigma_tot):
        """ΔQ of inserting the removed node i; vectorized over candidates"""
        W = self.total_weight
        return 2.0 * k_in / W - 2.0 * sigma_tot * self.degrees[i] / (W * W)

    def modularity(self) -> float:
        W = self.total_weight
        return float(self.sigma_in.sum() / W - np.dot(self.sigma_tot, self.sigma_tot) / (W * W))

    def check_caches(self):
        """Compare Σ_in and Σ_tot with a from-scratch recomputation"""
        labels = self.community
        if np.any(labels < 0):
            raise NumericError("Cache check requested while a node is removed")
        sigma_tot = np.bincount(labels, weights=self.degrees, minlength=self.n)
        P = np.zeros((self.n, self.n))
        P[np.arange(self.n), labels] = 1.0
        sigma_in = np.diag(P.T @ self.M @ P)
        if not (np.allclose(sigma_tot, self.sigma_tot, rtol=0.0, atol=CACHE_TOLERANCE)
                and np.allclose(sigma_in, self.sigma_in, rtol=0.0, atol=CACHE_TOLERANCE)):
            raise NumericError("Louvain community caches drifted from their recomputation")
        if abs(self.sigma_tot.sum() - self.total_weight) > CACHE_TOLERANCE * max(1.0, self.total_weight):
            raise NumericError("Σ_tot no longer sums to the total weight")
        logger.debug("Louvain caches verified")

    def _smallest_member(self, c: int) -> int:
        return int(np.flatnonzero(self.community == c)[0])

    def move_nodes(self, order: Sequence[int]) -> int:
        """One pass over `order`; returns the number of accepted moves"""
        moves = 0
        for i in order:
            home = int(self.community[i])
            links = self.links(i)
            self.remove(i, links[home])
            candidates = np.unique(np.append(self.community[self.neighbours[i]], home))
            gains = self.gain(i, links[candidates], self.sigma_tot[candidates])
            home_gain = gains[np.searchsorted(candidates, home)]
            best = gains.max()
            target = home
            if best - home_gain > self.min_gain:
                tied = candidates[gains == best]
                target = int(min(tied, key=self._smallest_member)) if tied.size > 1 else int(tied[0])
                moves += 1
            self.insert(i, target, links[target])
        return moves


def delta_q(state: LouvainState, i: int, target: int) -> float:
    """ΔQ of inserting the removed node i into community `target`"""
    if target < 0 or target >= state.n:
        raise InputError(f"Unknown community {target}")
    if state.community[i] != -1:
        raise InputError(f"Node {i} must be removed from its community first")
    k_in = state.links(i)[target]
    return float(state.gain(i, k_in, state.sigma_tot[target]))


@dataclass(frozen=True)
class LevelRecord:
    """Partition of the original nodes after one level, and its modularity on M"""
    partition: Partition
    modularity: float


@dataclass(frozen=True)
class DetectionResult:
    partition: Partition
    modularity: float
    levels: Tuple[LevelRecord, ...] = ()
    # Q after each phase-1 pass, all levels in order
    history: Tuple[float, ...] = ()
    pipeline: Optional[PipelineResult] = field(default=None, compare=False)

    @property
    def n_communities(self) -> int:
        return self.partition.k


def _detect(A: WeightedGraph, M: WeightedGraph, seed: Optional[int],
            min_gain: float, check_caches: bool) -> DetectionResult:
    A.require_same_size(M, "M")
    if M.total_weight <= 0:
        raise NumericError("Cannot optimize modularity: M has zero total weight")

    rng = np.random.default_rng(seed)
    assignment = np.arange(A.n)
    A_level, M_level = A.weights, M.weights
    levels: List[LevelRecord] = []
    history: List[float] = []

    while True:
        state = LouvainState(A_level, M_level, min_gain)
        level_moves = 0
        while True:
            moves = state.move_nodes(rng.permutation(state.n))
            history.append(state.modularity())
            if check_caches:
                state.check_caches()
            logger.debug(f"Level {len(levels)} pass: {moves} move(s), Q={history[-1]:.6f}")
            if moves == 0:
                break
            level_moves += moves
        if level_moves == 0:
            break

        level_partition = Partition(state.community)
        assignment = level_partition.assignment[assignment]
        record = LevelRecord(Partition(assignment), history[-1])
        levels.append(record)
        logger.info(
            f"Level {len(levels)}: {state.n} nodes -> {level_partition.k} communities, "
            f"Q={record.modularity:.6f}"
        )
        if level_partition.k == state.n:
            break
        A_level = _coarsen_array(A_level, level_partition)
        M_level = _coarsen_array(M_level, level_partition)

    partition = Partition(assignment)
    louvain_levels.observe(len(levels))
    return DetectionResult(
        partition=partition,
        modularity=_modularity_array(M.weights, partition),
        levels=tuple(levels),
        history=tuple(history)
    )


@track_time(detection_duration_seconds, {'algorithm': 'louvain'})
def louvain(A: WeightedGraph, seed: Optional[int] = None, min_gain: float = MIN_GAIN,
            check_caches: bool = False) -> DetectionResult:
    """Multi-level modularity optimization on A"""
    detection_runs_total.labels(algorithm='louvain').inc()
    return _detect(A, A, seed, min_gain, check_caches)


@track_time(detection_duration_seconds, {'algorithm': 'duo_louvain'})
def duo_louvain(A: WeightedGraph, M: WeightedGraph, seed: Optional[int] = None,
                min_gain: float = MIN_GAIN, check_caches: bool = False) -> DetectionResult:
    """Louvain with neighbourhoods from A and modularity gains on M"""
    detection_runs_total.labels(algorithm='duo_louvain').inc()
    return _detect(A, M, seed, min_gain, check_caches)


@track_time(detection_duration_seconds, {'algorithm': 'multiple_bipolar_duo_louvain'})
def multiple_bipolar_duo_louvain(source: Union[ExtendedMultipleBipolarFuzzyGraph, DirectBipolarGraph],
                                 cfg: PipelineConfig, seed: Optional[int] = None,
                                 settings: Optional[ShapleySettings] = None,
                                 min_gain: float = MIN_GAIN,
                                 check_caches: bool = False) -> DetectionResult:
    """Build M from the bipolar sources, then run duo_louvain(A, M)"""
    detection_runs_total.labels(algorithm='multiple_bipolar_duo_louvain').inc()
    pipeline = build_modularity_matrix(source, cfg, settings)
    result = _detect(source.graph, pipeline.M, seed, min_gain, check_caches)
    return DetectionResult(
        partition=result.partition,
        modularity=result.modularity,
        levels=result.levels,
        history=result.history,
        pipeline=pipeline
    )

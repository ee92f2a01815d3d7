"""
Planted-partition benchmark instances: a crisp graph A and bipolar relation
matrices F⁻, F⁺ drawn from two independent block structures.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from community import Partition
from errors import InputError
from monitoring import benchmark_instances_total
from weighted_graph import WeightedGraph

logger = logging.getLogger(__name__)

# label -> (alpha, beta); 64α + 192β stays close to 32 along the family
DENSITY_LABELS: Dict[int, Tuple[float, float]] = {
    1: (0.45, 0.016),
    2: (0.4, 0.033),
    3: (0.35, 0.05),
    4: (0.325, 0.058),
    5: (0.3, 0.066),
    6: (0.275, 0.075),
    7: (0.25, 0.083),
    8: (0.225, 0.091),
    9: (0.2, 0.1),
}

# case -> (graph block sizes, relation block sizes)
CASE_LAYOUTS: Dict[int, Tuple[Tuple[int, ...], Tuple[int, ...]]] = {
    1: ((128, 128), (64, 64, 64, 64)),
    2: ((64, 64, 64, 64), (32,) * 8),
    3: ((128, 128), (43, 42, 43, 96, 32)),
    4: ((64, 64, 64, 64), (40, 24, 64, 21, 22, 21, 32, 32)),
}

SeedLike = Union[int, np.random.Generator, None]


def _check_probability(name: str, value: float):
    if not 0.0 <= value <= 1.0:
        raise InputError(f"{name} must lie in [0, 1], got {value}")


def table_parameters(label: int) -> Tuple[float, float]:
    """(alpha, beta) of a density label 1..9"""
    if label not in DENSITY_LABELS:
        raise InputError(f"Benchmark label must be one of 1..9, got {label}")
    return DENSITY_LABELS[label]


@dataclass(frozen=True)
class BenchmarkSpec:
    graph_sizes: Tuple[int, ...]
    relation_sizes: Tuple[int, ...]
    alpha: float
    beta: float
    alpha_rel: float
    beta_rel: float
    seed: int = 0
    case: Optional[int] = None
    graph_label: Optional[int] = None
    relations_label: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, 'graph_sizes', tuple(int(s) for s in self.graph_sizes))
        object.__setattr__(self, 'relation_sizes', tuple(int(s) for s in self.relation_sizes))
        if not self.graph_sizes or not self.relation_sizes:
            raise InputError("Block size lists must not be empty")
        if any(s < 1 for s in self.graph_sizes + self.relation_sizes):
            raise InputError("Block sizes must be positive")
        if sum(self.graph_sizes) != sum(self.relation_sizes):
            raise InputError(
                f"Graph blocks cover {sum(self.graph_sizes)} nodes, "
                f"relation blocks cover {sum(self.relation_sizes)}"
            )
        for name in ('alpha', 'beta', 'alpha_rel', 'beta_rel'):
            _check_probability(name, getattr(self, name))

    @property
    def n(self) -> int:
        return sum(self.graph_sizes)


@dataclass(frozen=True)
class BenchmarkInstance:
    spec: BenchmarkSpec
    A: WeightedGraph
    F_minus: WeightedGraph
    F_plus: WeightedGraph
    gold: Partition
    graph_blocks: Partition


def planted_graph(sizes: Sequence[int], p_in: float, p_out: float,
                  seed: SeedLike = None) -> Tuple[WeightedGraph, Partition]:
    """Symmetric 0/1 matrix with an edge between i < j with probability p_in
    inside a block and p_out across blocks; blocks are consecutive node ranges.
    """
    sizes = [int(s) for s in sizes]
    if not sizes:
        raise InputError("planted_graph needs at least one block")
    if any(s < 1 for s in sizes):
        raise InputError(f"Block sizes must be positive, got {sizes}")
    if sum(sizes) < 2:
        raise InputError("planted_graph needs at least two nodes")
    _check_probability("p_in", p_in)
    _check_probability("p_out", p_out)

    rng = np.random.default_rng(seed)
    labels = np.repeat(np.arange(len(sizes)), sizes)
    same_block = labels[:, None] == labels[None, :]
    probability = np.where(same_block, p_in, p_out)
    draws = rng.random(probability.shape) < probability
    upper = np.triu(draws, k=1)
    adjacency = (upper | upper.T).astype(float)
    return WeightedGraph(adjacency), Partition(labels)


def case_spec(case: int, graph_label: int, relations_label: Optional[int] = None,
              seed: int = 0) -> BenchmarkSpec:
    """Benchmark case 1..4 with density labels for the graph and the relations.

    F⁺ uses (α, β) of the relations label; F⁻ uses the reversed pair, so its
    blocks are sparse and the links across them dense.
    """
    if case not in CASE_LAYOUTS:
        raise InputError(f"Benchmark case must be one of 1..4, got {case}")
    relations_label = graph_label if relations_label is None else relations_label
    alpha, beta = table_parameters(graph_label)
    alpha_rel, beta_rel = table_parameters(relations_label)
    graph_sizes, relation_sizes = CASE_LAYOUTS[case]
    return BenchmarkSpec(
        graph_sizes=graph_sizes, relation_sizes=relation_sizes,
        alpha=alpha, beta=beta, alpha_rel=alpha_rel, beta_rel=beta_rel,
        seed=seed, case=case, graph_label=graph_label, relations_label=relations_label
    )


def generate_instance(spec: BenchmarkSpec) -> BenchmarkInstance:
    """Draw A, F⁺ and F⁻ in that order from one generator seeded with spec.seed"""
    rng = np.random.default_rng(spec.seed)
    A, graph_blocks = planted_graph(spec.graph_sizes, spec.alpha, spec.beta, rng)
    F_plus, gold = planted_graph(spec.relation_sizes, spec.alpha_rel, spec.beta_rel, rng)
    F_minus, _ = planted_graph(spec.relation_sizes, spec.beta_rel, spec.alpha_rel, rng)

    benchmark_instances_total.labels(case=str(spec.case or 'custom')).inc()
    logger.debug(
        f"Generated instance case={spec.case} labels=({spec.graph_label}, {spec.relations_label}) "
        f"seed={spec.seed}: {int(A.total_weight) // 2} graph edges, "
        f"{int(F_plus.total_weight) // 2} positive and {int(F_minus.total_weight) // 2} negative relations"
    )
    return BenchmarkInstance(
        spec=spec, A=A, F_minus=F_minus, F_plus=F_plus, gold=gold, graph_blocks=graph_blocks
    )

"""
Associated weighted graphs of bipolar fuzzy measures and the aggregation
pipeline that turns s sources of positive/negative evidence into the
modularity matrix M.

Steps:
  1. F⁻ℓ, F⁺ℓ from each bipolar measure (Shapley drops, symmetrized by φ)
  2. F⁻ = Φ⁻(F⁻¹, ..., F⁻ˢ)
  3. F⁺ = Φ⁺(F⁺¹, ..., F⁺ˢ)
  4. F⁻_op = N(F⁻)
  5. F_b* = ψ(F⁻_op, F⁺), then M = γA + (1 - γ)F_b*
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from aggregation import (
    MAX, MIN, STANDARD_NEGATION, AggregatorSpec, NegationSpec,
    aggregate_stack, classify, negate_matrix
)
from errors import InputError
from fuzzy_measure import BipolarFuzzyMeasure, FuzzyMeasure, ShapleySettings, shapley_drops
from weighted_graph import WeightedGraph

logger = logging.getLogger(__name__)

__all__ = [
    'WeightedGraph', 'ExtendedMultipleBipolarFuzzyGraph', 'BipolarMultiGraph',
    'DirectBipolarGraph', 'PipelineConfig', 'PipelineResult',
    'associated_matrix', 'bipolar_associated', 'build_multi', 'aggregate_side',
    'combine_bipolar', 'theta_combine', 'build_modularity_matrix', 'describe_group_notion',
]


@dataclass(frozen=True)
class ExtendedMultipleBipolarFuzzyGraph:
    """Crisp graph plus s bipolar fuzzy measures over its nodes"""
    graph: WeightedGraph
    measures: Tuple[BipolarFuzzyMeasure, ...]

    def __post_init__(self):
        object.__setattr__(self, 'measures', tuple(self.measures))
        if not self.measures:
            raise InputError("At least one bipolar fuzzy measure is required")
        for index, measure in enumerate(self.measures, start=1):
            if measure.n != self.graph.n:
                raise InputError(
                    f"Measure {index} is defined on {measure.n} nodes, graph has {self.graph.n}"
                )

    @property
    def s(self) -> int:
        return len(self.measures)


@dataclass(frozen=True)
class BipolarMultiGraph:
    """The 2s relation matrices F⁻¹..F⁻ˢ, F⁺¹..F⁺ˢ"""
    negatives: Tuple[WeightedGraph, ...]
    positives: Tuple[WeightedGraph, ...]

    def __post_init__(self):
        object.__setattr__(self, 'negatives', tuple(self.negatives))
        object.__setattr__(self, 'positives', tuple(self.positives))
        if not self.negatives or len(self.negatives) != len(self.positives):
            raise InputError(
                f"Need as many negative as positive matrices (at least one), got "
                f"{len(self.negatives)} and {len(self.positives)}"
            )
        reference = self.negatives[0]
        for name, matrices in (('F-', self.negatives), ('F+', self.positives)):
            for index, matrix in enumerate(matrices, start=1):
                reference.require_same_size(matrix, f"{name}{index}")
                matrix.require_relation(f"{name}{index}")

    @property
    def s(self) -> int:
        return len(self.negatives)

    @property
    def n(self) -> int:
        return self.negatives[0].n


@dataclass(frozen=True)
class DirectBipolarGraph:
    """Crisp graph with relation matrices supplied directly, skipping Shapley"""
    graph: WeightedGraph
    relations: BipolarMultiGraph

    def __post_init__(self):
        self.graph.require_same_size(self.relations.negatives[0], "relation matrices")

    @property
    def s(self) -> int:
        return self.relations.s


@dataclass(frozen=True)
class PipelineConfig:
    """Operator choices that define the notion of group.

    phi_neg/phi_pos are the per-source bivariate operators, multi_neg/multi_pos
    aggregate the s sources of each side, psi merges the negated negative side
    with the positive one and gamma weighs A against F_b*.
    """
    phi_neg: Tuple[AggregatorSpec, ...] = (MAX,)
    phi_pos: Tuple[AggregatorSpec, ...] = (MAX,)
    multi_neg: AggregatorSpec = MAX
    multi_pos: AggregatorSpec = MAX
    negation: NegationSpec = STANDARD_NEGATION
    psi: AggregatorSpec = MIN
    gamma: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, 'phi_neg', tuple(self.phi_neg))
        object.__setattr__(self, 'phi_pos', tuple(self.phi_pos))
        if not 0.0 <= self.gamma <= 1.0:
            raise InputError(f"gamma must lie in [0, 1], got {self.gamma}")
        if len(self.phi_neg) != len(self.phi_pos):
            raise InputError(
                f"phi_neg has {len(self.phi_neg)} operators, phi_pos has {len(self.phi_pos)}"
            )

    def broadcast(self, s: int) -> 'PipelineConfig':
        """Repeat single φ operators so that there is one pair per source"""
        if len(self.phi_neg) == s:
            return self
        if len(self.phi_neg) != 1:
            raise InputError(f"{len(self.phi_neg)} operator pairs given for {s} sources")
        return PipelineConfig(
            phi_neg=self.phi_neg * s, phi_pos=self.phi_pos * s,
            multi_neg=self.multi_neg, multi_pos=self.multi_pos,
            negation=self.negation, psi=self.psi, gamma=self.gamma
        )


@dataclass(frozen=True)
class PipelineResult:
    relations: BipolarMultiGraph
    F_minus: WeightedGraph
    F_plus: WeightedGraph
    F_op_minus: WeightedGraph
    F_b: WeightedGraph
    M: WeightedGraph
    group_notion: Dict[str, str] = field(default_factory=dict)


def associated_matrix(m: FuzzyMeasure, phi: AggregatorSpec,
                      settings: Optional[ShapleySettings] = None) -> WeightedGraph:
    """F[i, j] = φ(Sh_i - Sh_i^j, Sh_j - Sh_j^i) for i != j, zero diagonal.

    Differences are clamped into [0, 1] before φ is applied.
    """
    drops = np.clip(shapley_drops(m, settings), 0.0, 1.0)
    F = aggregate_stack(phi, np.stack([drops, drops.T]))
    np.fill_diagonal(F, 0.0)
    return WeightedGraph(F)


def bipolar_associated(b: BipolarFuzzyMeasure, phi_neg: AggregatorSpec, phi_pos: AggregatorSpec,
                       settings: Optional[ShapleySettings] = None) -> Tuple[WeightedGraph, WeightedGraph]:
    """(F⁻, F⁺) of one bipolar fuzzy measure"""
    return (
        associated_matrix(b.negative, phi_neg, settings),
        associated_matrix(b.positive, phi_pos, settings),
    )


def build_multi(g: ExtendedMultipleBipolarFuzzyGraph, cfg: PipelineConfig,
                settings: Optional[ShapleySettings] = None) -> BipolarMultiGraph:
    """Step 1 for every source"""
    if len(cfg.phi_neg) != g.s:
        raise InputError(f"{g.s} measures but {len(cfg.phi_neg)} operator pairs")
    pairs = [
        bipolar_associated(measure, phi_neg, phi_pos, settings)
        for measure, phi_neg, phi_pos in zip(g.measures, cfg.phi_neg, cfg.phi_pos)
    ]
    return BipolarMultiGraph(
        negatives=tuple(pair[0] for pair in pairs),
        positives=tuple(pair[1] for pair in pairs)
    )


def aggregate_side(Phi: AggregatorSpec, matrices: Sequence[WeightedGraph]) -> WeightedGraph:
    """Entrywise s-ary aggregation of one side's relation matrices"""
    if not matrices:
        raise InputError("No matrices to aggregate")
    reference = matrices[0]
    for index, matrix in enumerate(matrices, start=1):
        reference.require_same_size(matrix, f"matrix {index}")
    return WeightedGraph(aggregate_stack(Phi, np.stack([m.weights for m in matrices])))


def combine_bipolar(psi: AggregatorSpec, negation: NegationSpec,
                    F_minus: WeightedGraph, F_plus: WeightedGraph) -> WeightedGraph:
    """F_b* = ψ(N(F⁻), F⁺), entrywise including the diagonal"""
    F_minus.require_same_size(F_plus, "F+")
    F_op = negate_matrix(negation, F_minus)
    return WeightedGraph(aggregate_stack(psi, np.stack([F_op.weights, F_plus.weights])))


def theta_combine(A: WeightedGraph, F_b: WeightedGraph, gamma: float) -> WeightedGraph:
    """M = γA + (1 - γ)F_b*"""
    if not 0.0 <= gamma <= 1.0:
        raise InputError(f"gamma must lie in [0, 1], got {gamma}")
    A.require_same_size(F_b, "F_b*")
    return WeightedGraph(gamma * A.weights + (1.0 - gamma) * F_b.weights)


def describe_group_notion(cfg: PipelineConfig) -> Dict[str, str]:
    """Aggregation class of Φ⁻, Φ⁺ and ψ, which fixes the kind of group sought"""
    return {
        'multi_neg': classify(cfg.multi_neg).value,
        'multi_pos': classify(cfg.multi_pos).value,
        'psi': classify(cfg.psi).value,
    }


def build_modularity_matrix(source: Union[ExtendedMultipleBipolarFuzzyGraph, DirectBipolarGraph],
                            cfg: PipelineConfig,
                            settings: Optional[ShapleySettings] = None) -> PipelineResult:
    """Run steps 1-5 and the θ combination"""
    cfg = cfg.broadcast(source.s)
    if isinstance(source, ExtendedMultipleBipolarFuzzyGraph):
        relations = build_multi(source, cfg, settings)
    else:
        relations = source.relations

    F_minus = aggregate_side(cfg.multi_neg, relations.negatives)
    F_plus = aggregate_side(cfg.multi_pos, relations.positives)
    F_op_minus = negate_matrix(cfg.negation, F_minus)
    F_b = combine_bipolar(cfg.psi, cfg.negation, F_minus, F_plus)
    M = theta_combine(source.graph, F_b, cfg.gamma)

    notion = describe_group_notion(cfg)
    logger.info(
        f"Built modularity matrix for {M.n} nodes from {relations.s} source(s): "
        f"Φ⁻ {notion['multi_neg']}, Φ⁺ {notion['multi_pos']}, ψ {notion['psi']}, γ={cfg.gamma}"
    )
    return PipelineResult(
        relations=relations, F_minus=F_minus, F_plus=F_plus,
        F_op_minus=F_op_minus, F_b=F_b, M=M, group_notion=notion
    )

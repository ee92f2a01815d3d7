"""
Aggregation operators (min, max, arithmetic mean, OWA), negations and the
conjunctive / disjunctive / averaging classification.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from errors import InputError
from weighted_graph import WeightedGraph

logger = logging.getLogger(__name__)

WEIGHT_TOLERANCE = 1e-10


class AggregatorKind(Enum):
    MIN = "min"
    MAX = "max"
    MEAN = "mean"
    OWA = "owa"


class AggregationClass(Enum):
    CONJUNCTIVE = "conjunctive"
    DISJUNCTIVE = "disjunctive"
    AVERAGING = "averaging"


@dataclass(frozen=True)
class AggregatorSpec:
    """An aggregation operator; OWA carries its weight vector"""
    kind: AggregatorKind
    weights: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.kind == AggregatorKind.OWA:
            if not self.weights:
                raise InputError("OWA operator needs a weight vector")
            weights = tuple(float(w) for w in self.weights)
            if any(w < -WEIGHT_TOLERANCE or w > 1 + WEIGHT_TOLERANCE for w in weights):
                raise InputError(f"OWA weights must lie in [0, 1], got {weights}")
            if abs(sum(weights) - 1.0) > WEIGHT_TOLERANCE:
                raise InputError(f"OWA weights must sum to 1, got {sum(weights)}")
            object.__setattr__(self, 'weights', weights)
        elif self.weights is not None:
            raise InputError(f"{self.kind.value} operator takes no weights")

    @classmethod
    def parse(cls, text: str) -> 'AggregatorSpec':
        """Parse 'min', 'max', 'mean' or 'owa:w1,w2,...'"""
        name, _, rest = text.strip().lower().partition(':')
        if name == 'average':
            name = 'mean'
        try:
            kind = AggregatorKind(name)
        except ValueError:
            raise InputError(f"Unknown aggregation operator '{text}'") from None
        if kind != AggregatorKind.OWA:
            if rest:
                raise InputError(f"{kind.value} operator takes no weights: '{text}'")
            return cls(kind)
        try:
            weights = tuple(float(w) for w in rest.split(',') if w.strip())
        except ValueError:
            raise InputError(f"Malformed OWA weights in '{text}'") from None
        return cls(kind, weights)

    def __str__(self) -> str:
        if self.kind == AggregatorKind.OWA:
            return "owa:" + ",".join(repr(w) for w in self.weights)
        return self.kind.value


MIN = AggregatorSpec(AggregatorKind.MIN)
MAX = AggregatorSpec(AggregatorKind.MAX)
MEAN = AggregatorSpec(AggregatorKind.MEAN)


def aggregate_stack(spec: AggregatorSpec, stack: np.ndarray) -> np.ndarray:
    """Aggregate along axis 0, e.g. s matrices stacked into an (s, n, n) array"""
    stack = np.asarray(stack, dtype=float)
    if stack.ndim < 1 or stack.shape[0] == 0:
        raise InputError("Cannot aggregate an empty input")
    if np.any(stack < -WEIGHT_TOLERANCE) or np.any(stack > 1 + WEIGHT_TOLERANCE):
        raise InputError("Aggregation inputs must lie in [0, 1]")

    if spec.kind == AggregatorKind.MIN:
        result = stack.min(axis=0)
    elif spec.kind == AggregatorKind.MAX:
        result = stack.max(axis=0)
    elif spec.kind == AggregatorKind.MEAN:
        result = stack.mean(axis=0)
    else:
        if len(spec.weights) != stack.shape[0]:
            raise InputError(
                f"OWA has {len(spec.weights)} weights but {stack.shape[0]} inputs"
            )
        # descending order statistics; ties are immaterial for the dot product
        ordered = np.flip(np.sort(stack, axis=0, kind='stable'), axis=0)
        result = np.tensordot(np.asarray(spec.weights), ordered, axes=1)
    return np.clip(result, 0.0, 1.0)


def aggregate(spec: AggregatorSpec, values: Sequence[float]) -> float:
    """Aggregate a nonempty vector of values in [0, 1]"""
    values = np.asarray(values, dtype=float)
    if values.ndim != 1:
        raise InputError(f"Expected a vector, got shape {values.shape}")
    return float(aggregate_stack(spec, values))


def classify(spec: AggregatorSpec) -> AggregationClass:
    """Min is conjunctive, max disjunctive, mean and every OWA averaging"""
    if spec.kind == AggregatorKind.MIN:
        return AggregationClass.CONJUNCTIVE
    if spec.kind == AggregatorKind.MAX:
        return AggregationClass.DISJUNCTIVE
    return AggregationClass.AVERAGING


class NegationKind(Enum):
    STANDARD = "standard"


@dataclass(frozen=True)
class NegationSpec:
    """Involutive negation; only the standard x -> 1 - x is provided"""
    kind: NegationKind = NegationKind.STANDARD

    @classmethod
    def parse(cls, text: str) -> 'NegationSpec':
        try:
            return cls(NegationKind(text.strip().lower()))
        except ValueError:
            raise InputError(f"Unknown negation '{text}'") from None

    def apply(self, values: np.ndarray) -> np.ndarray:
        return 1.0 - np.asarray(values, dtype=float)


STANDARD_NEGATION = NegationSpec()


def negate_matrix(negation: NegationSpec, F: WeightedGraph) -> WeightedGraph:
    """Entrywise antonym of a relation matrix"""
    F.require_relation("negated matrix")
    return WeightedGraph(negation.apply(F.weights))

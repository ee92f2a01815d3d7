"""
Fuzzy measures (capacities) on finite ground sets and their Shapley values.

Subsets are encoded as bit masks: bit i is set when element i (0-based) belongs
to the subset. Explicit measures store one value per mask, additive measures
store one weight per element.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterable, List, Mapping, Optional, Tuple, Union

import numpy as np
from joblib import Parallel, delayed
from scipy.special import comb

from errors import InputError, NumericError

logger = logging.getLogger(__name__)

EXACT_SHAPLEY_CAP = 24
TOLERANCE = 1e-10
SAMPLING_BATCH = 10000


def subset_to_mask(subset: Iterable[int], n: int) -> int:
    """Encode a collection of 0-based element indices as a bit mask"""
    mask = 0
    for element in subset:
        element = int(element)
        if element < 0 or element >= n:
            raise InputError(f"Element index {element} outside ground set of size {n}")
        mask |= 1 << element
    return mask


def mask_to_subset(mask: int) -> Tuple[int, ...]:
    """Decode a bit mask into the sorted tuple of 0-based element indices"""
    mask = int(mask)
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


@lru_cache(maxsize=32)
def _popcounts(n: int) -> np.ndarray:
    """Cardinality of every subset mask of an n-element ground set"""
    masks = np.arange(1 << n, dtype=np.int64)
    counts = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        counts += (masks >> i) & 1
    counts.flags.writeable = False
    return counts


def _freeze(values: np.ndarray) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class ExplicitMeasure:
    """Set function given by a full table indexed by subset mask.

    The table is not required to be a valid capacity: restricted games and
    candidate measures read from files use the same representation and are
    checked with validate_measure.
    """
    table: np.ndarray

    def __post_init__(self):
        table = _freeze(self.table)
        if table.ndim != 1 or table.size < 2 or table.size & (table.size - 1):
            raise InputError(
                f"Explicit measure table must have 2^n entries with n >= 1, got {table.size}"
            )
        object.__setattr__(self, 'table', table)

    @property
    def n(self) -> int:
        return self.table.size.bit_length() - 1

    @classmethod
    def from_subsets(cls, n: int, values: Mapping[Tuple[int, ...], float]) -> 'ExplicitMeasure':
        """Build from a subset -> value mapping (0-based); absent subsets become NaN"""
        if n < 1:
            raise InputError(f"Ground set must have at least one element, got n={n}")
        table = np.full(1 << n, np.nan)
        for subset, value in values.items():
            table[subset_to_mask(subset, n)] = float(value)
        return cls(table)

    def value(self, mask: int) -> float:
        return float(self.table[mask])

    def values(self, masks: np.ndarray) -> np.ndarray:
        return self.table[masks]


@dataclass(frozen=True, eq=False)
class AdditiveMeasure:
    """Set function whose value is the sum of the member weights"""
    weights: np.ndarray

    def __post_init__(self):
        weights = _freeze(self.weights)
        if weights.ndim != 1 or weights.size < 1:
            raise InputError("Additive measure needs a nonempty weight vector")
        object.__setattr__(self, 'weights', weights)

    @property
    def n(self) -> int:
        return self.weights.size

    @classmethod
    def uniform(cls, n: int) -> 'AdditiveMeasure':
        """Equal weights 1/n"""
        if n < 1:
            raise InputError(f"Ground set must have at least one element, got n={n}")
        return cls(np.full(n, 1.0 / n))

    def value(self, mask: int) -> float:
        return float(sum(self.weights[i] for i in mask_to_subset(mask)))

    def values(self, masks: np.ndarray) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.int64)
        members = (masks[..., None] >> np.arange(self.n)) & 1
        return members @ self.weights


FuzzyMeasure = Union[ExplicitMeasure, AdditiveMeasure]


@dataclass(frozen=True)
class BipolarFuzzyMeasure:
    """Pair of capacities carrying negative and positive relational evidence"""
    negative: FuzzyMeasure
    positive: FuzzyMeasure

    def __post_init__(self):
        if self.negative.n != self.positive.n:
            raise InputError(
                f"Bipolar measure components disagree on ground set size: "
                f"{self.negative.n} vs {self.positive.n}"
            )

    @property
    def n(self) -> int:
        return self.negative.n


class ViolationKind(Enum):
    MISSING = "missing"
    RANGE = "range"
    EMPTY_SET = "empty_set"
    FULL_SET = "full_set"
    MONOTONICITY = "monotonicity"
    NEGATIVE_WEIGHT = "negative_weight"
    WEIGHT_SUM = "weight_sum"


@dataclass(frozen=True)
class Violation:
    """One failed capacity condition; subsets are 0-based index tuples"""
    kind: ViolationKind
    message: str
    subset: Optional[Tuple[int, ...]] = None
    superset: Optional[Tuple[int, ...]] = None


def validate_measure(m: FuzzyMeasure, tolerance: float = TOLERANCE) -> List[Violation]:
    """Check boundary conditions, range and monotonicity; empty list means valid"""
    violations: List[Violation] = []

    if isinstance(m, AdditiveMeasure):
        for i in np.flatnonzero(m.weights < -tolerance):
            violations.append(Violation(
                ViolationKind.NEGATIVE_WEIGHT,
                f"weight of element {i} is negative ({m.weights[i]})",
                subset=(int(i),)
            ))
        total = float(m.weights.sum())
        if abs(total - 1.0) > tolerance:
            violations.append(Violation(
                ViolationKind.WEIGHT_SUM, f"weights sum to {total}, expected 1"
            ))
        return violations

    table = m.table
    n = m.n
    full = (1 << n) - 1

    for mask in np.flatnonzero(np.isnan(table)):
        violations.append(Violation(
            ViolationKind.MISSING, "no value for subset", subset=mask_to_subset(mask)
        ))

    out_of_range = (table < -tolerance) | (table > 1.0 + tolerance)
    for mask in np.flatnonzero(out_of_range):
        violations.append(Violation(
            ViolationKind.RANGE, f"value {table[mask]} outside [0, 1]",
            subset=mask_to_subset(mask)
        ))

    if not np.isnan(table[0]) and abs(table[0]) > tolerance:
        violations.append(Violation(
            ViolationKind.EMPTY_SET, f"value of the empty set is {table[0]}, expected 0",
            subset=()
        ))
    if not np.isnan(table[full]) and abs(table[full] - 1.0) > tolerance:
        violations.append(Violation(
            ViolationKind.FULL_SET, f"value of the ground set is {table[full]}, expected 1",
            subset=mask_to_subset(full)
        ))

    # covering pairs S ⊂ S ∪ {i} are enough, monotonicity is transitive
    masks = np.arange(1 << n, dtype=np.int64)
    for i in range(n):
        lower = masks[((masks >> i) & 1) == 0]
        upper = lower | (1 << i)
        bad = table[lower] > table[upper] + tolerance
        for low, up in zip(lower[bad], upper[bad]):
            violations.append(Violation(
                ViolationKind.MONOTONICITY,
                f"value drops from {table[low]} to {table[up]} when adding element {i}",
                subset=mask_to_subset(low),
                superset=mask_to_subset(up)
            ))

    return violations


def evaluate(m: FuzzyMeasure, subset: Iterable[int]) -> float:
    """Value of the measure on a subset of 0-based element indices"""
    return m.value(subset_to_mask(subset, m.n))


def restrict(m: FuzzyMeasure, excluded: int) -> FuzzyMeasure:
    """Game on the ground set without `excluded`.

    Surviving elements keep their relative order and are renumbered 0..n-2.
    The result is not renormalized: its value on the new ground set is
    μ(V \\ {excluded}), usually below 1.
    """
    n = m.n
    if excluded < 0 or excluded >= n:
        raise InputError(f"Excluded element {excluded} outside ground set of size {n}")
    if n < 2:
        raise InputError("Cannot restrict a measure on a single element")

    if isinstance(m, AdditiveMeasure):
        return AdditiveMeasure(np.delete(m.weights, excluded))

    reduced = np.arange(1 << (n - 1), dtype=np.int64)
    low = reduced & ((1 << excluded) - 1)
    high = reduced >> excluded
    return ExplicitMeasure(m.table[low | (high << (excluded + 1))])


def _subset_weights(n: int) -> np.ndarray:
    """Shapley weight |S|!(n-|S|-1)!/n! indexed by |S| = 0..n-1"""
    return 1.0 / (n * comb(n - 1, np.arange(n), exact=False))


def _exact_from_table(table: np.ndarray, n: int) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.int64)
    sizes = _popcounts(n)
    weights = _subset_weights(n)
    values = np.empty(n)
    for i in range(n):
        bit = 1 << i
        without = masks[(masks & bit) == 0]
        marginal = table[without | bit] - table[without]
        values[i] = np.dot(weights[sizes[without]], marginal)
    return values


def shapley(m: FuzzyMeasure, exact_cap: int = EXACT_SHAPLEY_CAP) -> np.ndarray:
    """Exact Shapley value of every element by subset enumeration.

    Additive measures return their weights directly.
    """
    if isinstance(m, AdditiveMeasure):
        return m.weights.copy()
    if m.n > exact_cap:
        raise NumericError(
            f"Exact Shapley values are limited to n <= {exact_cap} (got n={m.n}); "
            f"use shapley_sampled instead"
        )
    return _exact_from_table(m.table, m.n)


def shapley_restricted(m: FuzzyMeasure, excluded: int,
                       exact_cap: int = EXACT_SHAPLEY_CAP) -> np.ndarray:
    """Shapley values of the unnormalized game without `excluded` (n-1 entries)"""
    return shapley(restrict(m, excluded), exact_cap=exact_cap)


@dataclass(frozen=True, eq=False)
class ShapleyEstimate:
    """Permutation-sampling estimate with per-element standard errors"""
    values: np.ndarray
    std_errors: np.ndarray
    samples: int


def shapley_sampled(m: FuzzyMeasure, samples: int, seed: Optional[int] = None,
                    batch_size: int = SAMPLING_BATCH) -> ShapleyEstimate:
    """Average marginal contribution over `samples` uniformly random orderings"""
    if samples < 1:
        raise InputError(f"samples must be >= 1, got {samples}")

    n = m.n
    if isinstance(m, AdditiveMeasure):
        # every marginal contribution equals the weight
        return ShapleyEstimate(m.weights.copy(), np.zeros(n), samples)

    rng = np.random.default_rng(seed)
    base = np.arange(n)
    total = np.zeros(n)
    total_sq = np.zeros(n)
    remaining = samples
    while remaining > 0:
        size = min(batch_size, remaining)
        orders = rng.permuted(np.tile(base, (size, 1)), axis=1)
        prefixes = np.cumsum(np.left_shift(np.int64(1), orders), axis=1)
        reached = m.values(prefixes)
        gains = np.diff(reached, axis=1, prepend=0.0)
        contributions = np.empty_like(gains)
        np.put_along_axis(contributions, orders, gains, axis=1)
        total += contributions.sum(axis=0)
        total_sq += (contributions ** 2).sum(axis=0)
        remaining -= size

    mean = total / samples
    if samples > 1:
        variance = np.maximum(total_sq / samples - mean ** 2, 0.0) * samples / (samples - 1)
        std_errors = np.sqrt(variance / samples)
    else:
        std_errors = np.zeros(n)
    return ShapleyEstimate(mean, std_errors, samples)


class ShapleyMethod(Enum):
    """AUTO: exact up to the cap, permutation sampling above it"""
    AUTO = "auto"
    EXACT = "exact"
    SAMPLED = "sampled"


@dataclass(frozen=True)
class ShapleySettings:
    method: ShapleyMethod = ShapleyMethod.EXACT
    exact_cap: int = EXACT_SHAPLEY_CAP
    samples: int = 20000
    seed: Optional[int] = None
    n_jobs: int = 1


def _resolve_method(m: FuzzyMeasure, settings: ShapleySettings) -> ShapleyMethod:
    if settings.method != ShapleyMethod.AUTO:
        return settings.method
    if isinstance(m, ExplicitMeasure) and m.n > settings.exact_cap:
        logger.warning(
            f"n={m.n} exceeds exact Shapley cap {settings.exact_cap}, "
            f"sampling {settings.samples} permutations"
        )
        return ShapleyMethod.SAMPLED
    return ShapleyMethod.EXACT


def _shapley_with(m: FuzzyMeasure, method: ShapleyMethod, settings: ShapleySettings) -> np.ndarray:
    if method == ShapleyMethod.SAMPLED:
        return shapley_sampled(m, settings.samples, settings.seed).values
    return shapley(m, exact_cap=settings.exact_cap)


def shapley_drops(m: FuzzyMeasure, settings: Optional[ShapleySettings] = None) -> np.ndarray:
    """Matrix D with D[i, j] = Sh_i(μ) - Sh_i^j(μ) for i != j, zero diagonal.

    The n restricted games are independent and are evaluated with joblib when
    settings.n_jobs != 1; the result does not depend on the worker count.
    """
    settings = settings or ShapleySettings()
    method = _resolve_method(m, settings)
    n = m.n
    full = _shapley_with(m, method, settings)
    drops = np.zeros((n, n))
    if n == 1:
        return drops

    restricted = Parallel(n_jobs=settings.n_jobs)(
        delayed(_shapley_with)(restrict(m, j), method, settings) for j in range(n)
    )
    for j, values in enumerate(restricted):
        others = np.delete(np.arange(n), j)
        drops[others, j] = full[others] - values
    return drops

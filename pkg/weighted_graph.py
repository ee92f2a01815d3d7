"""
Symmetric nonnegative weight matrices shared by every pipeline stage
"""

from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from errors import InputError

SYMMETRY_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Read-only symmetric n x n matrix of nonnegative weights.

    Used both for topology (A) and for relation matrices (F family, entries
    in [0, 1]). Diagonal entries are self-loops.
    """
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] < 1:
            raise InputError(f"Weight matrix must be square and nonempty, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise InputError("Weight matrix contains non-finite entries")
        if np.any(w < 0):
            raise InputError(f"Weight matrix has negative entries (min {w.min()})")
        if not np.allclose(w, w.T, rtol=0.0, atol=SYMMETRY_TOLERANCE):
            raise InputError("Weight matrix is not symmetric")
        w = (w + w.T) / 2.0
        w.flags.writeable = False
        object.__setattr__(self, 'weights', w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def total_weight(self) -> float:
        """2m: sum over all ordered pairs, diagonal counted once"""
        return float(self.weights.sum())

    def degrees(self) -> np.ndarray:
        return self.weights.sum(axis=1)

    def is_relation(self) -> bool:
        return bool(np.all(self.weights <= 1.0))

    def require_relation(self, name: str = "relation matrix") -> 'WeightedGraph':
        """Return self, or raise when an entry lies outside [0, 1]"""
        if not self.is_relation():
            raise InputError(f"{name} has entries above 1 (max {self.weights.max()})")
        return self

    def require_same_size(self, other: 'WeightedGraph', name: str = "matrix") -> None:
        if other.n != self.n:
            raise InputError(f"Dimension mismatch: {name} is {other.n}x{other.n}, expected {self.n}x{self.n}")

    @classmethod
    def zeros(cls, n: int) -> 'WeightedGraph':
        return cls(np.zeros((n, n)))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int]], weight: float = 1.0) -> 'WeightedGraph':
        """Symmetric matrix with `weight` on every listed 0-based pair"""
        w = np.zeros((n, n))
        for i, j in edges:
            w[i, j] = weight
            w[j, i] = weight
        return cls(w)

"""
Partition comparison: entropy, mutual information and normalized mutual
information (NMI). All quantities are in nats.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.stats import entropy as shannon_entropy
from sklearn.metrics import mutual_info_score
from sklearn.metrics.cluster import contingency_matrix

from community import Partition
from errors import InputError


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """counts[x, y] = nodes placed in community x by X and in y by Y"""
    counts: np.ndarray

    @classmethod
    def from_labels(cls, labels_x: Sequence, labels_y: Sequence) -> 'ContingencyTable':
        """Table of two raw label vectors; rows and columns follow sorted label order"""
        labels_x, labels_y = np.asarray(labels_x), np.asarray(labels_y)
        if labels_x.shape != labels_y.shape or labels_x.ndim != 1:
            raise InputError(f"Label vectors differ in shape ({labels_x.shape} vs {labels_y.shape})")
        return cls(contingency_matrix(labels_x, labels_y))

    @classmethod
    def from_partitions(cls, X: Partition, Y: Partition) -> 'ContingencyTable':
        _require_same_nodes(X, Y)
        return cls.from_labels(X.assignment, Y.assignment)

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def row_marginals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def column_marginals(self) -> np.ndarray:
        return self.counts.sum(axis=0)


def _require_same_nodes(X: Partition, Y: Partition):
    if X.n != Y.n:
        raise InputError(f"Partitions cover different node sets ({X.n} vs {Y.n} nodes)")


def _ordered(X: Partition, Y: Partition) -> Tuple[Partition, Partition]:
    """Fixed argument order so that symmetric quantities are bitwise symmetric"""
    differ = np.flatnonzero(X.assignment != Y.assignment)
    if differ.size and X.assignment[differ[0]] > Y.assignment[differ[0]]:
        return Y, X
    return X, Y


def entropy(p: Partition) -> float:
    """H = -Σ (|C|/n) ln(|C|/n)"""
    return float(shannon_entropy(p.sizes()))


def mutual_information(X: Partition, Y: Partition) -> float:
    _require_same_nodes(X, Y)
    X, Y = _ordered(X, Y)
    return float(mutual_info_score(X.assignment, Y.assignment))


def nmi(X: Partition, Y: Partition) -> float:
    """2 MI / (H(X) + H(Y)).

    Two single-community partitions score 1; when only one of them is a
    single community the score is 0.
    """
    _require_same_nodes(X, Y)
    if X == Y:
        return 1.0
    X, Y = _ordered(X, Y)
    if X.k == 1 or Y.k == 1:
        return 0.0
    mi = float(mutual_info_score(X.assignment, Y.assignment))
    return float(np.clip(2.0 * mi / (entropy(X) + entropy(Y)), 0.0, 1.0))

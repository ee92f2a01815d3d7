"""
Shared fixtures: the eight-node example bundle and small random graphs
"""

from pathlib import Path

import numpy as np
import pytest

from bipolar_graph import BipolarMultiGraph, DirectBipolarGraph
from matrix_io import read_matrix
from weighted_graph import WeightedGraph

EXAMPLE_DIR = Path(__file__).resolve().parent.parent / "data" / "example1"


def random_weighted_graph(n: int, seed: int, density: float = 0.5,
                          integer: bool = False, loops: bool = False) -> WeightedGraph:
    """Symmetric random graph with at least one edge"""
    rng = np.random.default_rng(seed)
    weights = rng.integers(1, 4, size=(n, n)).astype(float) if integer else rng.random((n, n))
    mask = np.triu(rng.random((n, n)) < density, k=1)
    mask[0, 1] = True
    w = np.where(mask, weights, 0.0)
    w = w + w.T
    if loops:
        w[np.diag_indices(n)] = rng.random(n) * (rng.random(n) < 0.3)
    return WeightedGraph(w)


@pytest.fixture
def example_dir() -> Path:
    return EXAMPLE_DIR


@pytest.fixture
def example_graph() -> WeightedGraph:
    return read_matrix(EXAMPLE_DIR / "A.csv")


@pytest.fixture
def example_relations() -> BipolarMultiGraph:
    return BipolarMultiGraph(
        negatives=(read_matrix(EXAMPLE_DIR / "Fminus1.csv"), read_matrix(EXAMPLE_DIR / "Fminus2.csv")),
        positives=(read_matrix(EXAMPLE_DIR / "Fplus1.csv"), read_matrix(EXAMPLE_DIR / "Fplus2.csv"))
    )


@pytest.fixture
def example_source(example_graph, example_relations) -> DirectBipolarGraph:
    return DirectBipolarGraph(example_graph, example_relations)


@pytest.fixture
def two_triangles() -> WeightedGraph:
    return WeightedGraph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])


@pytest.fixture
def single_edge() -> WeightedGraph:
    return WeightedGraph.from_edges(2, [(0, 1)])

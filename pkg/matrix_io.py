"""
Reading and writing matrices, measures, partitions and configuration files
"""

import logging
from pathlib import Path
from typing import Optional, Type, TypeVar, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ValidationError

from aggregation import AggregatorKind, AggregatorSpec, NegationSpec
from bipolar_graph import PipelineConfig
from community import Partition
from errors import InputError
from fuzzy_measure import AdditiveMeasure, BipolarFuzzyMeasure, ExplicitMeasure, FuzzyMeasure
from schemas import (
    AggregatorSchema, BipolarMeasureFile, MatrixSummary, MeasureFile,
    PartitionFile, PipelineConfigFile
)
from weighted_graph import WeightedGraph

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
Model = TypeVar('Model', bound=BaseModel)

EDGE_LIST_SUFFIXES = {'.tsv', '.edges'}


def _read_text(path: PathLike) -> str:
    try:
        return Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise InputError(f"Cannot read {path}: {e.strerror or e}") from e


def read_model(path: PathLike, model: Type[Model]) -> Model:
    """Parse and validate a JSON file against a schema"""
    try:
        return model.model_validate_json(_read_text(path))
    except ValidationError as e:
        raise InputError(f"Invalid {model.__name__} in {path}: {e}") from e


def write_model(path: PathLike, document: BaseModel):
    Path(path).write_text(document.model_dump_json(indent=2, by_alias=True) + "\n", encoding='utf-8')


# Matrices

def read_dense_matrix(path: PathLike) -> WeightedGraph:
    """Comma-separated n x n matrix, optionally preceded by a line holding n"""
    lines = [line for line in _read_text(path).splitlines() if line.strip()]
    if not lines:
        raise InputError(f"Matrix file {path} is empty")
    declared: Optional[int] = None
    if ',' not in lines[0]:
        try:
            declared = int(lines[0].strip())
        except ValueError:
            declared = None
        else:
            lines = lines[1:]
    try:
        rows = [[float(x) for x in line.split(',')] for line in lines]
        data = np.array(rows, dtype=float)
    except ValueError as e:
        raise InputError(f"Malformed matrix file {path}: {e}") from e
    if data.ndim != 2:
        raise InputError(f"Matrix file {path} has rows of different lengths")
    if declared is not None and data.shape != (declared, declared):
        raise InputError(f"Matrix file {path} declares n={declared} but holds {data.shape[0]}x{data.shape[1]}")
    return WeightedGraph(data)


def read_edge_list(path: PathLike, n: Optional[int] = None) -> WeightedGraph:
    """Tab-separated `i j [weight]` rows, 1-based, closed symmetrically"""
    try:
        frame = pd.read_csv(path, sep='\t', header=None, comment='#')
    except FileNotFoundError as e:
        raise InputError(f"Cannot read {path}: no such file") from e
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        raise InputError(f"Malformed edge list {path}: {e}") from e
    if frame.shape[1] not in (2, 3):
        raise InputError(f"Edge list {path} needs 2 or 3 columns, got {frame.shape[1]}")
    if frame.shape[1] == 2:
        frame[2] = 1.0
    frame.columns = ['i', 'j', 'weight']

    nodes = frame[['i', 'j']].to_numpy()
    if not np.issubdtype(nodes.dtype, np.integer) or nodes.min() < 1:
        raise InputError(f"Edge list {path} must use positive integer node ids")
    size = int(nodes.max()) if n is None else n
    if nodes.max() > size:
        raise InputError(f"Edge list {path} references node {nodes.max()} but n={size}")

    weights = np.zeros((size, size))
    rows, cols = nodes[:, 0] - 1, nodes[:, 1] - 1
    values = frame['weight'].to_numpy(dtype=float)
    weights[rows, cols] = values
    weights[cols, rows] = values
    return WeightedGraph(weights)


def read_matrix(path: PathLike, n: Optional[int] = None) -> WeightedGraph:
    """Dense CSV, or edge list for .tsv/.edges files"""
    if Path(path).suffix.lower() in EDGE_LIST_SUFFIXES:
        return read_edge_list(path, n)
    matrix = read_dense_matrix(path)
    if n is not None and matrix.n != n:
        raise InputError(f"Matrix {path} is {matrix.n}x{matrix.n}, expected {n}x{n}")
    return matrix


def write_matrix(path: PathLike, matrix: WeightedGraph):
    np.savetxt(path, matrix.weights, delimiter=',', fmt='%.17g')


def matrix_summary(matrix: WeightedGraph) -> MatrixSummary:
    w = matrix.weights
    off_diagonal = ~np.eye(matrix.n, dtype=bool)
    density = float(np.count_nonzero(w[off_diagonal]) / off_diagonal.sum()) if matrix.n > 1 else 0.0
    return MatrixSummary(min=float(w.min()), max=float(w.max()), mean=float(w.mean()), density=density)


# Measures

def measure_from_schema(document: MeasureFile) -> FuzzyMeasure:
    if document.form == "additive":
        return AdditiveMeasure(np.asarray(document.weights, dtype=float))
    values = {tuple(i - 1 for i in entry.subset): entry.value for entry in document.values}
    return ExplicitMeasure.from_subsets(document.n, values)


def read_measure(path: PathLike) -> FuzzyMeasure:
    return measure_from_schema(read_model(path, MeasureFile))


def read_bipolar_measure(path: PathLike) -> BipolarFuzzyMeasure:
    document = read_model(path, BipolarMeasureFile)
    return BipolarFuzzyMeasure(
        negative=measure_from_schema(document.negative),
        positive=measure_from_schema(document.positive)
    )


# Partitions

def partition_to_schema(p: Partition) -> PartitionFile:
    return PartitionFile(n=p.n, communities=[[i + 1 for i in c] for c in p.communities()])


def partition_from_schema(document: PartitionFile) -> Partition:
    return Partition.from_communities(
        [[i - 1 for i in members] for members in document.communities], document.n
    )


def read_partition(path: PathLike) -> Partition:
    """Partition JSON, or a node,label CSV for .csv files"""
    if Path(path).suffix.lower() == '.csv':
        try:
            frame = pd.read_csv(path)
        except FileNotFoundError as e:
            raise InputError(f"Cannot read {path}: no such file") from e
        if list(frame.columns) != ['node', 'label']:
            raise InputError(f"Partition CSV {path} needs the columns node,label")
        frame = frame.sort_values('node')
        if frame['node'].tolist() != list(range(1, len(frame) + 1)):
            raise InputError(f"Partition CSV {path} must list nodes 1..n exactly once")
        return Partition(frame['label'].to_numpy())
    return partition_from_schema(read_model(path, PartitionFile))


def write_partition(path: PathLike, p: Partition):
    write_model(path, partition_to_schema(p))


def write_partition_csv(path: PathLike, p: Partition):
    frame = pd.DataFrame({'node': np.arange(1, p.n + 1), 'label': p.assignment})
    frame.to_csv(path, index=False)


# Pipeline configuration

def aggregator_from_schema(document: AggregatorSchema) -> AggregatorSpec:
    weights = tuple(document.weights) if document.weights is not None else None
    return AggregatorSpec(AggregatorKind(document.kind), weights)


def pipeline_config_from_schema(document: PipelineConfigFile) -> PipelineConfig:
    return PipelineConfig(
        phi_neg=tuple(aggregator_from_schema(a) for a in document.phi_neg),
        phi_pos=tuple(aggregator_from_schema(a) for a in document.phi_pos),
        multi_neg=aggregator_from_schema(document.multi_neg),
        multi_pos=aggregator_from_schema(document.multi_pos),
        negation=NegationSpec.parse(document.negation),
        psi=aggregator_from_schema(document.psi),
        gamma=document.gamma
    )


def read_pipeline_config(path: PathLike) -> PipelineConfig:
    return pipeline_config_from_schema(read_model(path, PipelineConfigFile))

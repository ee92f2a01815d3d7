"""
Reproduction grid runner for the planted-partition benchmark tables.

Every (graph label, relations label) cell averages the NMI of
`iterations` independent instances. Seeds are derived from the cell
position, so results do not depend on execution order or worker count.
"""

import logging
import time
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from aggregation import MEAN, MIN, AggregatorSpec
from benchmark import DENSITY_LABELS, case_spec, generate_instance
from bipolar_graph import BipolarMultiGraph, DirectBipolarGraph, PipelineConfig
from community import multiple_bipolar_duo_louvain
from errors import InputError
from metrics import nmi
from monitoring import reproduce_cells_total

logger = logging.getLogger(__name__)

LABELS = tuple(sorted(DENSITY_LABELS))
SEED_STRIDE = 10000


class CellStatus(Enum):
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass
class ReproductionCell:
    case: int
    graph_label: int
    relations_label: int
    gamma: float
    status: CellStatus = CellStatus.PENDING
    scores: List[float] = field(default_factory=list)
    elapsed_seconds: float = 0.0
    started_at: Optional[str] = None
    completed_at: Optional[str] = None
    error_message: Optional[str] = None

    @property
    def cell_id(self) -> str:
        return f"case{self.case}-g{self.graph_label}-r{self.relations_label}-gamma{self.gamma:g}"

    @property
    def mean_nmi(self) -> float:
        if self.status != CellStatus.COMPLETED or not self.scores:
            return float('nan')
        return float(np.mean(self.scores))


def cell_seed(base_seed: int, graph_label: int, relations_label: int, iteration: int) -> int:
    """Positional seed of one iteration of one cell"""
    return base_seed + SEED_STRIDE * (graph_label * 9 + relations_label) + iteration


def reproduction_config(gamma: float, multi: AggregatorSpec = MEAN) -> PipelineConfig:
    """Averaging Φ on both sides, conjunctive ψ"""
    return PipelineConfig(
        phi_neg=(MEAN,), phi_pos=(MEAN,), multi_neg=multi, multi_pos=multi, psi=MIN, gamma=gamma
    )


def run_iteration(case: int, graph_label: int, relations_label: int,
                  cfg: PipelineConfig, seed: int) -> float:
    """Generate one instance, detect communities and score them against the gold partition"""
    instance = generate_instance(case_spec(case, graph_label, relations_label, seed))
    source = DirectBipolarGraph(
        graph=instance.A,
        relations=BipolarMultiGraph(negatives=(instance.F_minus,), positives=(instance.F_plus,))
    )
    result = multiple_bipolar_duo_louvain(source, cfg, seed=seed)
    return nmi(result.partition, instance.gold)


def _work_item(case: int, graph_label: int, relations_label: int,
               cfg: PipelineConfig, seed: int) -> Tuple[Optional[float], Optional[str], float]:
    start = time.time()
    try:
        score = run_iteration(case, graph_label, relations_label, cfg, seed)
        return score, None, time.time() - start
    except Exception as e:
        return None, f"{type(e).__name__}: {e}", time.time() - start


class ReproductionRunner:
    """Runs the label grid of one benchmark case for one or more γ values"""

    def __init__(self, case: int, gammas: Sequence[float] = (0.0,), iterations: int = 100,
                 seed: int = 0, n_jobs: int = 1,
                 graph_labels: Sequence[int] = LABELS, relations_labels: Sequence[int] = LABELS,
                 multi: AggregatorSpec = MEAN):
        if iterations < 1:
            raise InputError(f"iterations must be >= 1, got {iterations}")
        for label in tuple(graph_labels) + tuple(relations_labels):
            if label not in DENSITY_LABELS:
                raise InputError(f"Benchmark label must be one of 1..9, got {label}")
        if not gammas:
            raise InputError("At least one gamma value is required")
        self.case = case
        self.gammas = tuple(gammas)
        self.configs = {gamma: reproduction_config(gamma, multi) for gamma in self.gammas}
        self.iterations = iterations
        self.seed = seed
        self.n_jobs = n_jobs
        self.graph_labels = tuple(sorted(set(graph_labels)))
        self.relations_labels = tuple(sorted(set(relations_labels)))
        # validates the case number once, before any work is scheduled
        case_spec(case, self.graph_labels[0], self.relations_labels[0], seed)
        self.cells: Dict[str, ReproductionCell] = {}
        for gamma in self.gammas:
            for g in self.graph_labels:
                for r in self.relations_labels:
                    cell = ReproductionCell(case, g, r, gamma)
                    self.cells[cell.cell_id] = cell

    def cells_for(self, gamma: float) -> List[ReproductionCell]:
        return [cell for cell in self.cells.values() if cell.gamma == gamma]

    def run_gamma(self, gamma: float) -> pd.DataFrame:
        """Evaluate every cell for one γ and return the mean-NMI table"""
        cells = self.cells_for(gamma)
        cfg = self.configs[gamma]
        logger.info(
            f"Reproducing case {self.case}, gamma={gamma:g}: {len(cells)} cells x "
            f"{self.iterations} iterations on {self.n_jobs} worker(s)"
        )
        for cell in cells:
            cell.status = CellStatus.RUNNING
            cell.started_at = datetime.now().isoformat()

        items = [
            (cell, iteration)
            for cell in cells
            for iteration in range(self.iterations)
        ]
        outcomes = Parallel(n_jobs=self.n_jobs)(
            delayed(_work_item)(
                self.case, cell.graph_label, cell.relations_label, cfg,
                cell_seed(self.seed, cell.graph_label, cell.relations_label, iteration)
            )
            for cell, iteration in items
        )

        per_cell: Dict[str, List[Tuple[int, Optional[float], Optional[str], float]]] = {}
        for (cell, iteration), (score, error, elapsed) in zip(items, outcomes):
            per_cell.setdefault(cell.cell_id, []).append((iteration, score, error, elapsed))

        for cell in cells:
            results = sorted(per_cell.get(cell.cell_id, []), key=lambda item: item[0])
            cell.elapsed_seconds = sum(item[3] for item in results)
            cell.completed_at = datetime.now().isoformat()
            errors = [item[2] for item in results if item[2] is not None]
            if errors:
                cell.status = CellStatus.FAILED
                cell.error_message = errors[0]
                logger.error(f"Cell {cell.cell_id} failed: {cell.error_message}")
            else:
                cell.scores = [item[1] for item in results]
                cell.status = CellStatus.COMPLETED
                logger.info(
                    f"Cell {cell.cell_id}: mean NMI {cell.mean_nmi:.4f} "
                    f"({cell.elapsed_seconds:.1f}s)"
                )
            reproduce_cells_total.labels(case=str(self.case), status=cell.status.value).inc()

        stats = self.get_stats()
        logger.info(f"Case {self.case}, gamma={gamma:g}: {stats['completed']} completed, {stats['failed']} failed")
        return self.table(gamma)

    def run(self) -> Dict[float, pd.DataFrame]:
        return {gamma: self.run_gamma(gamma) for gamma in self.gammas}

    def table(self, gamma: float) -> pd.DataFrame:
        """Rows are graph labels, columns relations labels"""
        frame = pd.DataFrame(
            index=pd.Index(self.graph_labels, name='graph'),
            columns=pd.Index(self.relations_labels, name='relations'),
            dtype=float
        )
        for cell in self.cells_for(gamma):
            frame.loc[cell.graph_label, cell.relations_label] = cell.mean_nmi
        return frame

    def get_stats(self) -> Dict[str, int]:
        stats = {status.value: 0 for status in CellStatus}
        for cell in self.cells.values():
            stats[cell.status.value] += 1
        stats['total'] = len(self.cells)
        return stats


def table_path(out: Path, gamma: float, sweep: bool) -> Path:
    """The output path itself, or one file per γ when several are requested"""
    out = Path(out)
    if not sweep:
        return out
    return out.with_name(f"{out.stem}_gamma{gamma:g}{out.suffix or '.csv'}")


def write_table(path: Path, table: pd.DataFrame):
    table.to_csv(path, float_format='%.6f')

"""
Prometheus metrics for community detection runs and benchmark reproductions
"""

import logging
import time
from functools import wraps
from typing import Callable, Optional

from prometheus_client import CollectorRegistry, Counter, Histogram, write_to_textfile

logger = logging.getLogger(__name__)

REGISTRY = CollectorRegistry()

# Detection metrics
detection_runs_total = Counter(
    'detection_runs_total',
    'Total number of community detection runs',
    ['algorithm'],
    registry=REGISTRY
)

detection_duration_seconds = Histogram(
    'detection_duration_seconds',
    'Duration of community detection runs in seconds',
    ['algorithm'],
    buckets=(0.001, 0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 30.0),
    registry=REGISTRY
)

louvain_levels = Histogram(
    'louvain_levels',
    'Number of coarsening levels per Louvain run',
    buckets=(0, 1, 2, 3, 4, 5, 6, 8, 10),
    registry=REGISTRY
)

# Benchmark metrics
benchmark_instances_total = Counter(
    'benchmark_instances_total',
    'Total benchmark instances generated',
    ['case'],
    registry=REGISTRY
)

reproduce_cells_total = Counter(
    'reproduce_cells_total',
    'Reproduction grid cells by final status',
    ['case', 'status'],
    registry=REGISTRY
)


def track_time(metric: Histogram, labels: Optional[dict] = None):
    """Decorator to track execution time"""
    def decorator(func: Callable):
        @wraps(func)
        def wrapper(*args, **kwargs):
            start = time.time()
            try:
                return func(*args, **kwargs)
            finally:
                duration = time.time() - start
                if labels:
                    metric.labels(**labels).observe(duration)
                else:
                    metric.observe(duration)
        return wrapper
    return decorator


def export_metrics(path: str):
    """Write the registry in the Prometheus text format (textfile collector)"""
    write_to_textfile(path, REGISTRY)
    logger.info(f"Metrics written to {path}")

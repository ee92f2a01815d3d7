#!/usr/bin/env python3
"""
Command-line interface for bipolar community detection.
"""

import json
import logging
import sys
import time
from functools import wraps
from pathlib import Path
from typing import List, Optional, Sequence

import click
from tabulate import tabulate

from aggregation import AggregatorSpec, NegationSpec
from benchmark import case_spec, generate_instance
from bipolar_graph import (
    BipolarMultiGraph, DirectBipolarGraph, ExtendedMultipleBipolarFuzzyGraph, PipelineConfig
)
from community import DetectionResult, louvain, multiple_bipolar_duo_louvain
from config import Config
from errors import InputError, ToolkitError
from experiments import ReproductionRunner, table_path, write_table
from fuzzy_measure import (
    ShapleyMethod, ShapleySettings, shapley, shapley_sampled, validate_measure
)
from matrix_io import (
    matrix_summary, read_bipolar_measure, read_matrix, read_measure, read_partition,
    read_pipeline_config, write_matrix, write_model, write_partition, write_partition_csv
)
from metrics import entropy, mutual_information, nmi
from monitoring import export_metrics
from schemas import BenchmarkManifest, ErrorResponse, NmiReport, RunReport

logger = logging.getLogger(__name__)

OPERATOR_HELP = 'min | max | mean | owa:w1,w2,...'


def handle_errors(func):
    """Report toolkit errors as a JSON document on stderr and exit with their code"""
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ToolkitError as e:
            logger.debug(f"{func.__name__} failed", exc_info=True)
            error = ErrorResponse(detail=str(e), error_type=e.error_type)
            click.echo(error.model_dump_json(), err=True)
            sys.exit(e.exit_code)
    return wrapper


def _parse_operator(text: Optional[str]) -> Optional[AggregatorSpec]:
    return AggregatorSpec.parse(text) if text else None


def _parse_labels(text: Optional[str]) -> Optional[List[int]]:
    if not text:
        return None
    try:
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise InputError(f"Labels must be comma-separated integers, got '{text}'") from None


def _prepare_output(path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


@click.group()
@click.option('--config', 'config_file', default=None, help='YAML configuration file')
@click.option('--verbose', '-v', is_flag=True, help='Debug logging')
@click.option('--metrics-file', type=click.Path(dir_okay=False), default=None,
              help='Write Prometheus metrics to this file on exit')
@click.pass_context
def cli(ctx, config_file, verbose, metrics_file):
    """Community detection on graphs with multiple bipolar fuzzy measures"""
    ctx.ensure_object(dict)
    config = Config(config_file)
    level = 'DEBUG' if verbose else str(config.get('logging.level', 'INFO')).upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format=config.get('logging.format')
    )
    ctx.obj['config'] = config
    if metrics_file:
        ctx.call_on_close(lambda: export_metrics(metrics_file))


def _pipeline_config(pipeline_file, phi_neg, phi_pos, multi_neg, multi_pos, negation, psi, gamma) -> PipelineConfig:
    """Pipeline file values, overridden by every flag that was given"""
    base = read_pipeline_config(pipeline_file) if pipeline_file else PipelineConfig()
    return PipelineConfig(
        phi_neg=tuple(AggregatorSpec.parse(p) for p in phi_neg) if phi_neg else base.phi_neg,
        phi_pos=tuple(AggregatorSpec.parse(p) for p in phi_pos) if phi_pos else base.phi_pos,
        multi_neg=_parse_operator(multi_neg) or base.multi_neg,
        multi_pos=_parse_operator(multi_pos) or base.multi_pos,
        negation=NegationSpec.parse(negation) if negation else base.negation,
        psi=_parse_operator(psi) or base.psi,
        gamma=base.gamma if gamma is None else gamma
    )


def _print_result(result: DetectionResult):
    rows = [
        [index + 1, len(members), ' '.join(str(i + 1) for i in members)]
        for index, members in enumerate(result.partition.communities())
    ]
    click.echo(tabulate(rows, headers=['Community', 'Size', 'Nodes'], tablefmt='grid'))
    click.echo(f"\nModularity: {result.modularity:.6f}  Levels: {len(result.levels)}")


@cli.command()
@click.option('--graph', 'graph_file', required=True, help='Adjacency matrix A (dense CSV or edge-list TSV)')
@click.option('--f-minus', multiple=True, help='Negative relation matrix (repeat for s > 1)')
@click.option('--f-plus', multiple=True, help='Positive relation matrix (repeat for s > 1)')
@click.option('--measures', multiple=True, help='Bipolar measure JSON (repeat for s > 1)')
@click.option('--pipeline', 'pipeline_file', default=None, help='Pipeline configuration JSON')
@click.option('--phi-neg', multiple=True, help=f'φ for negative measures: {OPERATOR_HELP}')
@click.option('--phi-pos', multiple=True, help=f'φ for positive measures: {OPERATOR_HELP}')
@click.option('--Phi-neg', 'multi_neg', default=None, help=f'Φ⁻ across sources: {OPERATOR_HELP}')
@click.option('--Phi-pos', 'multi_pos', default=None, help=f'Φ⁺ across sources: {OPERATOR_HELP}')
@click.option('--negation', default=None, help='Negation (standard)')
@click.option('--psi', default=None, help=f'ψ combining both sides: {OPERATOR_HELP}')
@click.option('--gamma', type=float, default=None, help='Weight of A in M = γA + (1 - γ)F_b*')
@click.option('--seed', type=int, default=0, help='Random seed for the node order')
@click.option('--shapley-method', type=click.Choice([m.value for m in ShapleyMethod]), default='auto')
@click.option('--n-jobs', type=int, default=None, help='Workers for restricted Shapley games')
@click.option('--out', default='partition.json', help='Partition JSON output')
@click.option('--partition-csv', default=None, help='Also write the partition as node,label CSV')
@click.option('--report', default=None, help='Run report JSON (default: <out>_report.json)')
@click.pass_context
@handle_errors
def detect(ctx, graph_file, f_minus, f_plus, measures, pipeline_file, phi_neg, phi_pos,
           multi_neg, multi_pos, negation, psi, gamma, seed, shapley_method, n_jobs,
           out, partition_csv, report):
    """Detect communities with Louvain or Multiple Bipolar Duo Louvain"""
    config = ctx.obj['config']
    cfg = _pipeline_config(pipeline_file, phi_neg, phi_pos, multi_neg, multi_pos, negation, psi, gamma)
    min_gain = float(config.get('louvain.min_gain', 1e-12))
    check_caches = bool(config.get('louvain.check_caches', False))
    start = time.time()

    A = read_matrix(graph_file)
    if measures and (f_minus or f_plus):
        raise InputError("Give either --measures or --f-minus/--f-plus, not both")

    if measures:
        settings = ShapleySettings(
            method=ShapleyMethod(shapley_method),
            exact_cap=int(config.get('shapley.exact_cap', 24)),
            samples=int(config.get('shapley.samples', 20000)),
            seed=seed,
            n_jobs=n_jobs if n_jobs is not None else int(config.get('reproduce.n_jobs', 1))
        )
        source = ExtendedMultipleBipolarFuzzyGraph(A, tuple(read_bipolar_measure(p) for p in measures))
        result = multiple_bipolar_duo_louvain(source, cfg, seed, settings, min_gain, check_caches)
        algorithm = 'multiple_bipolar_duo_louvain'
    elif f_minus or f_plus:
        relations = BipolarMultiGraph(
            negatives=tuple(read_matrix(p, A.n) for p in f_minus),
            positives=tuple(read_matrix(p, A.n) for p in f_plus)
        )
        source = DirectBipolarGraph(A, relations)
        result = multiple_bipolar_duo_louvain(source, cfg, seed, None, min_gain, check_caches)
        algorithm = 'multiple_bipolar_duo_louvain'
    else:
        result = louvain(A, seed, min_gain, check_caches)
        algorithm = 'louvain'

    out = _prepare_output(out)
    write_partition(out, result.partition)
    if partition_csv:
        write_partition_csv(_prepare_output(partition_csv), result.partition)

    matrices = {'A': matrix_summary(A)}
    gamma_used = 1.0
    group_notion = {}
    if result.pipeline is not None:
        pipeline = result.pipeline
        gamma_used = cfg.gamma
        group_notion = pipeline.group_notion
        matrices.update({
            'F_minus': matrix_summary(pipeline.F_minus),
            'F_plus': matrix_summary(pipeline.F_plus),
            'F_b': matrix_summary(pipeline.F_b),
            'M': matrix_summary(pipeline.M),
        })
    run_report = RunReport(
        algorithm=algorithm,
        n=A.n,
        seed=seed,
        gamma=gamma_used,
        modularity=result.modularity,
        communities=result.n_communities,
        levels=len(result.levels),
        level_modularity=[level.modularity for level in result.levels],
        group_notion=group_notion,
        matrices=matrices,
        elapsed_seconds=time.time() - start
    )
    report_path = Path(report) if report else out.with_name(f"{out.stem}_report.json")
    write_model(_prepare_output(report_path), run_report)

    _print_result(result)
    click.echo(f"Partition written to {out}")


@cli.command()
@click.option('--case', type=click.IntRange(1, 4), required=True, help='Benchmark case')
@click.option('--label', type=int, required=True, help='Density label (1..9) for the graph')
@click.option('--relations-label', type=int, default=None, help='Density label for F⁻/F⁺ (default: --label)')
@click.option('--seed', type=int, default=0)
@click.option('--out', 'out_dir', required=True, help='Instance directory')
@click.pass_context
@handle_errors
def generate(ctx, case, label, relations_label, seed, out_dir):
    """Generate a planted-partition benchmark instance"""
    spec = case_spec(case, label, relations_label, seed)
    instance = generate_instance(spec)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = {'A': 'A.csv', 'F_minus': 'Fminus.csv', 'F_plus': 'Fplus.csv', 'gold': 'gold.json'}
    write_matrix(out_dir / files['A'], instance.A)
    write_matrix(out_dir / files['F_minus'], instance.F_minus)
    write_matrix(out_dir / files['F_plus'], instance.F_plus)
    write_partition(out_dir / files['gold'], instance.gold)
    write_model(out_dir / 'manifest.json', BenchmarkManifest(
        case=spec.case, graph_label=spec.graph_label, relations_label=spec.relations_label,
        n=spec.n, graph_sizes=list(spec.graph_sizes), relation_sizes=list(spec.relation_sizes),
        alpha=spec.alpha, beta=spec.beta, alpha_rel=spec.alpha_rel, beta_rel=spec.beta_rel,
        seed=spec.seed, files=files
    ))
    logger.info(f"Generated case {case} instance (labels {spec.graph_label}/{spec.relations_label}, seed {seed}) in {out_dir}")
    click.echo(f"✓ Instance written to {out_dir}")


@cli.command()
@click.argument('partition_x')
@click.argument('partition_y')
@click.option('--details', is_flag=True, help='Include mutual information and entropies')
@click.option('--out', default=None, help='Also write the result to this JSON file')
@handle_errors
def evaluate(partition_x, partition_y, details, out):
    """Compare two partitions with NMI"""
    X = read_partition(partition_x)
    Y = read_partition(partition_y)
    report = NmiReport(nmi=nmi(X, Y))
    if details:
        report.mutual_information = mutual_information(X, Y)
        report.entropy_x = entropy(X)
        report.entropy_y = entropy(Y)
    if out:
        write_model(_prepare_output(out), report)
    click.echo(report.model_dump_json(exclude_none=True))


@cli.command()
@click.option('--case', type=click.IntRange(1, 4), required=True, help='Benchmark case')
@click.option('--gamma', type=float, multiple=True, help='γ value (repeat for a sweep)')
@click.option('--iterations', type=int, default=None, help='Instances per cell')
@click.option('--seed', type=int, default=None, help='Base seed')
@click.option('--n-jobs', type=int, default=None, help='joblib workers (-1 for all cores)')
@click.option('--graph-labels', default=None, help='Comma-separated graph labels (default 1..9)')
@click.option('--relations-labels', default=None, help='Comma-separated relations labels (default 1..9)')
@click.option('--Phi', 'multi', type=click.Choice(['mean', 'max']), default='mean',
              help='Φ⁻ and Φ⁺ used across sources')
@click.option('--out', required=True, help='Table CSV (one file per γ when sweeping)')
@click.pass_context
@handle_errors
def reproduce(ctx, case, gamma, iterations, seed, n_jobs, graph_labels, relations_labels, multi, out):
    """Reproduce a mean-NMI benchmark table"""
    config = ctx.obj['config']
    gammas: Sequence[float] = gamma or tuple(config.get('reproduce.gammas', [0.0]))
    for value in gammas:
        if not 0.0 <= value <= 1.0:
            raise InputError(f"gamma must lie in [0, 1], got {value}")

    kwargs = {}
    labels = _parse_labels(graph_labels)
    if labels:
        kwargs['graph_labels'] = labels
    labels = _parse_labels(relations_labels)
    if labels:
        kwargs['relations_labels'] = labels

    runner = ReproductionRunner(
        case=case,
        gammas=tuple(float(g) for g in gammas),
        iterations=iterations if iterations is not None else int(config.get('reproduce.iterations', 100)),
        seed=seed if seed is not None else int(config.get('reproduce.seed', 0)),
        n_jobs=n_jobs if n_jobs is not None else int(config.get('reproduce.n_jobs', 1)),
        multi=AggregatorSpec.parse(multi),
        **kwargs
    )
    tables = runner.run()
    sweep = len(tables) > 1
    for value, table in tables.items():
        path = _prepare_output(table_path(Path(out), value, sweep))
        write_table(path, table)
        click.echo(f"\nCase {case}, γ={value:g}")
        click.echo(tabulate(table, headers='keys', tablefmt='grid', floatfmt='.4f'))
        click.echo(f"Table written to {path}")

    stats = runner.get_stats()
    click.echo(f"\nCells: {stats['completed']} completed, {stats['failed']} failed")


@cli.command('validate-measure')
@click.argument('measure_file')
@click.option('--bipolar', is_flag=True, help='File holds a {"negative", "positive"} pair')
@click.pass_context
@handle_errors
def validate_measure_command(ctx, measure_file, bipolar):
    """Check that a measure file describes a valid fuzzy measure"""
    tolerance = float(ctx.obj['config'].get('shapley.tolerance', 1e-10))
    if bipolar:
        b = read_bipolar_measure(measure_file)
        parts = [('negative', b.negative), ('positive', b.positive)]
    else:
        parts = [('measure', read_measure(measure_file))]

    rows = []
    for name, measure in parts:
        for violation in validate_measure(measure, tolerance):
            rows.append([
                name,
                violation.kind.value,
                '{' + ','.join(str(i + 1) for i in violation.subset) + '}' if violation.subset is not None else '',
                violation.message
            ])

    if not rows:
        click.echo(f"✓ {measure_file} is a valid fuzzy measure")
        return
    click.echo(tabulate(rows, headers=['Measure', 'Violation', 'Subset', 'Detail'], tablefmt='grid'))
    raise InputError(f"{measure_file} has {len(rows)} violation(s)")


@cli.command('shapley')
@click.argument('measure_file')
@click.option('--method', type=click.Choice(['exact', 'sampled']), default='exact')
@click.option('--samples', type=int, default=None, help='Permutations for the sampled estimate')
@click.option('--seed', type=int, default=0)
@click.option('--format', 'output_format', type=click.Choice(['table', 'json']), default='table',
              help='Output format')
@click.pass_context
@handle_errors
def shapley_command(ctx, measure_file, method, samples, seed, output_format):
    """Print the Shapley value of every element of a measure"""
    config = ctx.obj['config']
    measure = read_measure(measure_file)
    if method == 'exact':
        values = shapley(measure, exact_cap=int(config.get('shapley.exact_cap', 24)))
        errors = None
    else:
        estimate = shapley_sampled(measure, samples or int(config.get('shapley.samples', 20000)), seed)
        values, errors = estimate.values, estimate.std_errors

    if output_format == 'json':
        payload = {'values': [float(v) for v in values]}
        if errors is not None:
            payload['std_errors'] = [float(e) for e in errors]
        click.echo(json.dumps(payload, indent=2))
        return

    headers = ['Element', 'Shapley value'] + (['Std. error'] if errors is not None else [])
    rows = [
        [i + 1, float(v)] + ([float(errors[i])] if errors is not None else [])
        for i, v in enumerate(values)
    ]
    click.echo(tabulate(rows, headers=headers, tablefmt='grid', floatfmt='.6f'))


if __name__ == '__main__':
    cli()

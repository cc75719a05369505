"""The lasso command: graph-guided fused lasso with the stochastic solver."""
import logging

import click
import numpy as np

from primaldual.cli.utils import flag_line, parse_shape, prepare_output, run_command, usage_guard
from primaldual.dataio import parse_libsvm, standard_normals, write_summary, write_trace_csv
from primaldual.models import AggregateRecord, StochasticTraceRecord, TraceRecord
from primaldual.ppdg import PpdgConfig, solve
from primaldual.problems import (
    box_violation,
    build_fused_lasso,
    build_precision_graph,
    load_graph,
    make_synthetic_lasso,
    relaxed_objective,
)
from primaldual.problems.fused_lasso import DEFAULT_GRAPH_THRESHOLD
from primaldual.sppdg import SppdgConfig, SppdgLyapunovConstants, choose_alpha, solve_stochastic
from primaldual.vrgrad import EstimatorKind, default_batch_size

logger = logging.getLogger(__name__)


def _load_data(input_path, synthetic, data_seed, n_hint):
    if synthetic is not None:
        n_samples, n_features = parse_shape(synthetic, separator=',')
        return usage_guard(make_synthetic_lasso, n_samples, n_features, seed=data_seed)
    dataset = parse_libsvm(input_path, n_hint=n_hint)
    return dataset.features, dataset.labels


def _initial_point(init, n, seed):
    """Zero, or a seeded Gaussian direction of unit length."""
    if init == 'zero':
        return np.zeros(n)
    x0 = standard_normals(seed, n)
    return x0 / np.linalg.norm(x0)


def _relative_gap(value, reference):
    return abs(value - reference) / max(abs(reference), np.finfo(float).tiny)


@click.command()
@click.option('--input', 'input_path', type=click.Path(exists=True, dir_okay=False),
              help='Dataset in LIBSVM format; two-class labels are mapped to -1/+1.')
@click.option('--synthetic', metavar='N,n', help='Generate N correlated samples with n features instead.')
@click.option('--data-seed', type=int, default=0, help='Seed of the synthetic data.')
@click.option('--n-hint', type=int, default=None, help='Feature count when the file does not reach it.')
@click.option('--graph', 'graph_path', type=click.Path(exists=True, dir_okay=False),
              help='Symmetric n x n graph matrix V as CSV; the correlation graph is built when omitted.')
@click.option('--threshold', type=float, default=DEFAULT_GRAPH_THRESHOLD,
              help='Absolute correlation above which two features are linked.')
@click.option('--estimator', type=click.Choice([k.value for k in EstimatorKind]), default=EstimatorKind.SVRG.value,
              help='Gradient estimator; full reproduces the deterministic solver.')
@click.option('--batch', 'batch_size', type=int, default=None,
              help='Mini-batch size; floor(0.01 N) when omitted, the fused-lasso setting.')
@click.option('--period', type=int, default=None, help='Full-gradient period of svrg and sarah; ceil(N/batch) when omitted.')
@click.option('--seeds', type=int, default=10, help='Number of independent runs, seeded 0..seeds-1.')
@click.option('--lambda', 'lam', type=float, default=1e-4,
              help='Weight of the lp penalty, as in the fused-lasso setting.')
@click.option('--p', type=float, default=0.5,
              help='Exponent of the lp quasi-norm, in (0, 1); the fused-lasso setting uses 1/2.')
@click.option('--r', type=float, default=1.0,
              help='Radius of the l_inf ball on A x, as in the fused-lasso setting.')
@click.option('--normalize/--no-normalize', default=True,
              help='Scale rows to unit norm, so L ~ 0.77.')
@click.option('--init', type=click.Choice(['zero', 'gaussian']), default='zero', help='Initial primal point.')
@click.option('--init-seed', type=int, default=0, help='Seed of the gaussian initial point.')
@click.option('--alpha', type=float, default=None, help='Primal step; chosen from L and kappa-hat when omitted.')
@click.option('--kappa-hat', type=float, default=0.0, help='Variance constant proxy; 0 keeps the deterministic step rule.')
@click.option('--max-epochs', type=float, default=50, help='Budget in passes over the N components.')
@click.option('--max-iters', type=int, default=None, help='Optional iteration cap per seed.')
@click.option('--tol', type=float, default=None, help='Stop when both step norms fall below this; TOL_STEP when omitted.')
@click.option('--workers', type=int, default=None, help='Threads for the seed runs; WORKERS when omitted.')
@click.option('--reference/--no-reference', default=False,
              help='Also run the deterministic solver and report the relative objective gap.')
@click.option('--record-time/--no-record-time', default=True, help='Zero the elapsed-time columns when off.')
@click.option('--output-dir', type=click.Path(file_okay=False), default=None,
              help='Where to write results; OUTPUT_DIR/lasso when omitted.')
@click.pass_context
@run_command
def lasso(ctx, input_path, synthetic, data_seed, n_hint, graph_path, threshold, estimator, batch_size,
          period, seeds, lam, p, r, normalize, init, init_seed, alpha, kappa_hat, max_epochs, max_iters,
          tol, workers, reference, record_time, output_dir):
    """Fit the nonconvex graph-guided fused lasso with the stochastic solver.

    Writes trace_seed<k>.csv per seed, aggregate.csv and summary.txt.
    """
    settings = ctx.obj
    if (input_path is None) == (synthetic is None):
        raise click.UsageError('give exactly one of --input and --synthetic')
    if seeds < 1:
        raise click.BadParameter('need at least one seed', param_hint='--seeds')

    features, labels = _load_data(input_path, synthetic, data_seed, n_hint)
    n_features = features.shape[1]
    if graph_path is not None:
        V = load_graph(graph_path, n=n_features)
    else:
        V = usage_guard(build_precision_graph, features, threshold)
    problem = usage_guard(build_fused_lasso, features, labels, V, lam=lam, p=p, r=r, normalize=normalize)
    n = problem.n_components

    kind = EstimatorKind(estimator)
    if kind is EstimatorKind.FULL:
        batch_size = n
    elif batch_size is None:
        batch_size = default_batch_size(n)
    if not 1 <= batch_size <= n:
        raise click.BadParameter(f'must lie in [1, {n}]', param_hint='--batch')
    if period is not None and period < 1:
        raise click.BadParameter('must be >= 1', param_hint='--period')

    config = SppdgConfig(
        alpha=alpha,
        kappa_hat=kappa_hat,
        max_epochs=max_epochs,
        max_iters=max_iters,
        tol_step=settings.TOL_STEP if tol is None else tol,
        seeds=tuple(range(seeds)),
        batch_size=batch_size,
        period=period,
        workers=settings.WORKERS if workers is None else workers,
        norm_cap=settings.NORM_CAP,
        record_time=record_time,
    )
    usage_guard(config.validate)
    step = usage_guard(choose_alpha, alpha, problem.lipschitz_L, kappa_hat)
    constants = SppdgLyapunovConstants.from_step(step, kappa_hat, problem.lipschitz_L)
    x0 = _initial_point(init, problem.dim, init_seed)

    output = prepare_output(output_dir or settings.OUTPUT_DIR / 'lasso')
    comment = flag_line(ctx)
    result = solve_stochastic(problem, kind, config, x0=x0)

    for report in result.reports:
        write_trace_csv(output / f'trace_seed{report.seed}.csv', report.trace, StochasticTraceRecord,
                        comment=comment)
    write_trace_csv(output / 'aggregate.csv', result.aggregate, AggregateRecord, comment=comment)

    relaxed = [relaxed_objective(problem, report.x) for report in result.reports]
    mean_relaxed = float(np.mean(relaxed)) if relaxed else float('nan')
    residuals_ok = sum(1 for report in result.reports if max(report.kkt_x, report.kkt_y) <= 1e-3)
    summary = {
        'problem': problem.name,
        'estimator': kind.value,
        'batch': batch_size,
        'alpha': step,
        'e0': constants.e0,
        'lipschitz_L': problem.lipschitz_L,
        'seeds': seeds,
        'seeds_ok': result.seeds_ok,
        'failed_seeds': ' '.join(str(seed) for seed in result.failed_seeds),
        'mean_final_objective': result.mean_final_objective,
        'mean_relaxed_objective': mean_relaxed,
        'max_box_violation': max((box_violation(problem, report.x) for report in result.reports),
                                 default=float('nan')),
        'max_kkt_x': max((report.kkt_x for report in result.reports), default=float('nan')),
        'max_kkt_y': max((report.kkt_y for report in result.reports), default=float('nan')),
        'seeds_kkt_below_1e-3': residuals_ok,
        'comp_evals': max((report.comp_evals for report in result.reports), default=0),
        'seconds': max((report.elapsed_s for report in result.reports), default=0.0),
    }

    if reference:
        reference_config = PpdgConfig(
            alpha=step, max_iters=settings.SOLVER_MAX_ITERS, tol_step=config.tol_step,
            lyapunov_checks=False, norm_cap=settings.NORM_CAP, record_time=record_time)
        baseline = solve(problem.as_composite(), reference_config, x0=x0)
        write_trace_csv(output / 'reference.csv', baseline.trace, TraceRecord, comment=comment)
        summary['reference_objective'] = relaxed_objective(problem, baseline.x)
        summary['reference_box_violation'] = box_violation(problem, baseline.x)
        summary['reference_iters'] = baseline.iters
        summary['relative_gap'] = _relative_gap(mean_relaxed, summary['reference_objective'])

    write_summary(output / 'summary.txt', summary)
    click.echo(f'{kind.value}: {result.seeds_ok}/{seeds} seeds ok, '
               f'mean relaxed objective {mean_relaxed:.10g}')
    if reference:
        click.echo(f'reference objective {summary["reference_objective"]:.10g}, '
                   f'relative gap {summary["relative_gap"]:.3e}')
    if not result.reports:
        raise click.ClickException('every seed diverged')

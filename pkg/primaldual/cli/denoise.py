"""The denoise command: l0-gradient denoising with the deterministic solver."""
import logging

import click

from primaldual.cli.utils import flag_line, parse_shape, prepare_output, run_command, usage_guard
from primaldual.dataio import (
    add_gaussian_noise,
    load_image,
    make_piecewise_constant,
    write_pgm,
    write_summary,
    write_trace_csv,
)
from primaldual.linops import Boundary
from primaldual.models import TraceRecord
from primaldual.ppdg import PpdgConfig, Preconditioner, TraceObjective, solve
from primaldual.problems import build_denoise, psnr

logger = logging.getLogger(__name__)


def _level_dir(output, sigma, several):
    if not several:
        return prepare_output(output)
    return prepare_output(output / f'sigma-{sigma:g}')


@click.command()
@click.option('--input', 'input_path', type=click.Path(exists=True, dir_okay=False),
              help='Clean image: PGM (P2/P5) or any format Pillow reads, converted to grayscale.')
@click.option('--synthetic', metavar='HxW', help='Use the built-in piecewise-constant image of this size.')
@click.option('--sigma', type=float, multiple=True, default=(0.05,),
              help='Gaussian noise level on the [0, 1] scale; repeat for several levels.')
@click.option('--seed', type=int, default=1, help='Noise seed.')
@click.option('--lambda', 'lam', type=float, default=0.1,
              help='Weight of the l0 gradient penalty, as in the l0-gradient denoising setting.')
@click.option('--c1', type=float, default=-1.0,
              help='Lower bound on gradient values; the full [-1, 1] range of the denoising setting.')
@click.option('--c2', type=float, default=1.0,
              help='Upper bound on gradient values; the full [-1, 1] range of the denoising setting.')
@click.option('--boundary', type=click.Choice([b.value for b in Boundary]), default=Boundary.PERIODIC.value,
              help='Boundary handling of the 2D gradient.')
@click.option('--alpha', type=float, default=None,
              help='Primal step; 0.9/(3L) = 0.3 when omitted, with beta = 1/(alpha||grad||^2).')
@click.option('--max-iters', type=int, default=None, help='Iteration cap; DENOISE_MAX_ITERS (500) when omitted.')
@click.option('--tol', type=float, default=None, help='Stop when both step norms fall below this; TOL_STEP when omitted.')
@click.option('--trace-objective', type=click.Choice([t.value for t in TraceObjective]),
              default=TraceObjective.ENVELOPE.value,
              help='Objective in trace.csv: f + h**(grad x), which the iteration descends on, or the exact l0 one.')
@click.option('--checks/--no-checks', default=False,
              help='Log per-iteration descent and residual bound violations.')
@click.option('--record-time/--no-record-time', default=True, help='Zero the elapsed-time columns when off.')
@click.option('--output-dir', type=click.Path(file_okay=False), default=None,
              help='Where to write results; OUTPUT_DIR/denoise when omitted.')
@click.pass_context
@run_command
def denoise(ctx, input_path, synthetic, sigma, seed, lam, c1, c2, boundary, alpha, max_iters, tol,
            trace_objective, checks, record_time, output_dir):
    """Denoise an image by l0-gradient minimization.

    Writes trace.csv, noisy.pgm, denoised.pgm and summary.txt for every
    noise level and prints one psnr_in,psnr_out,iters,seconds row each.
    """
    settings = ctx.obj
    if (input_path is None) == (synthetic is None):
        raise click.UsageError('give exactly one of --input and --synthetic')
    if any(level < 0 for level in sigma):
        raise click.BadParameter('noise levels must be >= 0', param_hint='--sigma')

    if synthetic is not None:
        height, width = parse_shape(synthetic)
        clean = usage_guard(make_piecewise_constant, height, width)
    else:
        clean = load_image(input_path)

    config = PpdgConfig(
        alpha=alpha,
        max_iters=settings.DENOISE_MAX_ITERS if max_iters is None else max_iters,
        tol_step=settings.TOL_STEP if tol is None else tol,
        preconditioner=Preconditioner.SCALAR_BETA,
        lyapunov_checks=checks,
        norm_cap=settings.NORM_CAP,
        record_time=record_time,
        trace_objective=TraceObjective(trace_objective),
    )
    output = prepare_output(output_dir or settings.OUTPUT_DIR / 'denoise')
    comment = flag_line(ctx)

    click.echo('sigma,psnr_in,psnr_out,iters,seconds')
    for level in sigma:
        noisy = add_gaussian_noise(clean, level, seed)
        problem = usage_guard(build_denoise, noisy.pixels, clean.height, clean.width,
                              lam=lam, c1=c1, c2=c2, boundary=Boundary(boundary))
        usage_guard(config.constants_for, problem.lipschitz_L)
        report = solve(problem, config, x0=noisy.pixels)
        denoised = noisy.with_pixels(report.x)

        target = _level_dir(output, level, len(sigma) > 1)
        write_trace_csv(target / 'trace.csv', report.trace, TraceRecord, comment=comment)
        write_pgm(target / 'noisy.pgm', noisy)
        write_pgm(target / 'denoised.pgm', denoised)

        psnr_in = psnr(noisy.pixels, clean.pixels, clean.height, clean.width)
        psnr_out = psnr(denoised.pixels, clean.pixels, clean.height, clean.width)
        write_summary(target / 'summary.txt', {
            'psnr_in': psnr_in,
            'psnr_out': psnr_out,
            'iters': report.iters,
            'seconds': report.elapsed_s,
            'sigma': level,
            'seed': seed,
            'reason': report.reason.value,
            'final_objective': problem.objective(report.x),
            'final_envelope_objective': problem.envelope_objective(report.x),
            'trace_objective': trace_objective,
            'kkt_x': report.kkt_x,
            'kkt_y': report.kkt_y,
        })
        logger.info(f'sigma={level:g}: psnr {psnr_in:.4f} -> {psnr_out:.4f} dB in {report.iters} iterations')
        click.echo(f'{level:g},{psnr_in:.4f},{psnr_out:.4f},{report.iters},{report.elapsed_s:.3f}')

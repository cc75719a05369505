"""Verification commands: closed-form prox conformance and operator spectra."""
import click
import numpy as np

from primaldual.cli.utils import parse_shape, run_command, usage_guard
from primaldual.conjprox import (
    ProxOracle,
    RegularizerKind,
    build_regularizer,
    conj_value_oracle,
    prox_conj_oracle,
)
from primaldual.linops import (
    Boundary,
    build_dense,
    build_gradient2d,
    build_identity,
    build_stacked,
    load_dense_csv,
    spectral_bounds,
)

BETAS = (0.1, 1.0, 10.0)
CONJ_TOLERANCE = 1e-3
MOREAU_TOLERANCE = 1e-10

REGULARIZERS = {
    'l1': RegularizerKind.L1,
    'l0': RegularizerKind.L0_BOX,
    'l0_box': RegularizerKind.L0_BOX,
    'lp': RegularizerKind.LP_BALL,
    'lp_ball': RegularizerKind.LP_BALL,
    'scad': RegularizerKind.SCAD_BOX,
    'scad_box': RegularizerKind.SCAD_BOX,
}

OPERATORS = ('identity', 'scaled-identity', 'gradient-2d', 'stacked', 'dense')

NOT_SURJECTIVE_NOTE = ('note: lambda_min(A A^T) = 0, so A is not surjective. exact_M has no plain prox '
                       'here; the solvers use scalar_beta, which only approximates alpha*A*A^T, and the '
                       'descent bounds become advisory.')


def prox_deviation(reg, beta, points, grid_step):
    """Largest |closed form - grid oracle| of prox_{beta h*} over ``points``."""
    oracle = ProxOracle(grid_step=grid_step)
    closed = reg.prox_conj(points, beta)
    brute = np.array([prox_conj_oracle(reg, v, beta, oracle) for v in points])
    return float(np.max(np.abs(closed - brute)))


def conj_deviation(reg, points, grid_step):
    """Largest |closed-form h* - grid sup of y*w - h(w)| over ``points``."""
    closed = reg.conj_terms(points)
    brute = np.array([conj_value_oracle(reg, y, grid_step) for y in points])
    return float(np.max(np.abs(closed - brute)))


def moreau_error(reg, rng, count):
    """v = prox_{beta h}(v) + beta*prox_{h*/beta}(v/beta) for the l1 norm."""
    v = rng.uniform(-5.0 * reg.lam, 5.0 * reg.lam, size=count)
    beta = rng.uniform(0.1, 10.0, size=count)
    rebuilt = np.array([reg.prox(vi, bi) + bi * reg.prox_conj(vi / bi, 1.0 / bi) for vi, bi in zip(v, beta)])
    return float(np.max(np.abs(v - rebuilt)))


@click.command('prox-check')
@click.option('--reg', 'reg_name', type=click.Choice(sorted(REGULARIZERS)), required=True,
              help='Regularizer: l1, l0 (l0 + box), lp (lp + inf-ball) or scad (SCAD + box).')
@click.option('--lambda', 'lam', type=float, default=1.0, help='Penalty weight.')
@click.option('--c1', type=float, default=-1.0, help='Lower box bound of l0.')
@click.option('--c2', type=float, default=1.0, help='Upper box bound of l0.')
@click.option('--p', type=float, default=0.5, help='Exponent of lp, in (0, 1).')
@click.option('--r', type=float, default=1.0, help='Ball radius of lp and scad.')
@click.option('--gamma', type=float, default=3.7, help='SCAD shape parameter, > 2.')
@click.option('--points', type=click.IntRange(min=1), default=1000, help='Random points per beta.')
@click.option('--conj-points', type=click.IntRange(min=1), default=200, help='Random points for the conjugate check.')
@click.option('--seed', type=int, default=0, help='Seed of the sample points.')
@click.option('--grid-step', type=float, default=None, help='Oracle grid step; ORACLE_GRID_STEP when omitted.')
@click.option('--tolerance', type=float, default=None,
              help='Allowed prox deviation; PROX_CHECK_TOLERANCE (5e-4) when omitted.')
@click.pass_context
@run_command
def prox_check(ctx, reg_name, lam, c1, c2, p, r, gamma, points, conj_points, seed, grid_step, tolerance):
    """Compare the closed-form prox of h* with a brute-force grid argmin.

    Sweeps beta over 0.1, 1 and 10, then checks h* against a grid supremum
    and, for l1, the Moreau decomposition. Exits 1 when a check fails.
    """
    settings = ctx.obj
    grid_step = settings.ORACLE_GRID_STEP if grid_step is None else grid_step
    tolerance = settings.PROX_CHECK_TOLERANCE if tolerance is None else tolerance
    if not grid_step > 0:
        raise click.BadParameter('must be positive', param_hint='--grid-step')
    kind = REGULARIZERS[reg_name]
    reg = usage_guard(build_regularizer, kind, lam, c1=c1, c2=c2, p=p, r=r, gamma=gamma)
    rng = np.random.default_rng(seed)

    click.echo(f'{reg!r}')
    passed = True
    for beta in BETAS:
        span = 1.5 * (reg.dual_slope * beta + reg.lam + 1.0)
        deviation = prox_deviation(reg, beta, rng.uniform(-span, span, size=points), grid_step)
        ok = deviation <= tolerance
        passed &= ok
        click.echo(f'beta={beta:g} prox max deviation {deviation:.3e} {"ok" if ok else "FAIL"}')

    # l1 has h* = +inf outside [-lam, lam]; sample inside it
    conj_span = reg.lam if kind is RegularizerKind.L1 else 3.0 * max(1.0, reg.lam)
    deviation = conj_deviation(reg, rng.uniform(-conj_span, conj_span, size=conj_points), grid_step)
    ok = deviation <= CONJ_TOLERANCE
    passed &= ok
    click.echo(f'conjugate max deviation {deviation:.3e} {"ok" if ok else "FAIL"}')

    if kind is RegularizerKind.L1:
        error = moreau_error(reg, rng, points)
        ok = error <= MOREAU_TOLERANCE
        passed &= ok
        click.echo(f'moreau max error {error:.3e} {"ok" if ok else "FAIL"}')

    click.echo('pass' if passed else 'fail')
    if not passed:
        ctx.exit(1)


def _build_operator(kind, n, scale, size, boundary, matrix_path):
    if kind == 'identity':
        return build_identity(n)
    if kind == 'scaled-identity':
        return build_identity(n, scale)
    if kind == 'gradient-2d':
        height, width = parse_shape(size)
        return build_gradient2d(height, width, Boundary(boundary))
    if kind == 'stacked':
        V = load_dense_csv(matrix_path) if matrix_path else np.eye(n)
        return build_stacked(V)
    if matrix_path is None:
        raise click.UsageError('--operator dense needs --matrix')
    return build_dense(load_dense_csv(matrix_path))


@click.command()
@click.option('--operator', 'kind', type=click.Choice(OPERATORS), required=True, help='Operator family.')
@click.option('--n', type=click.IntRange(min=1), default=4, help='Dimension of identity and stacked operators.')
@click.option('--scale', type=float, default=1.0, help='Factor s of the scaled identity.')
@click.option('--size', default='8x8', metavar='HxW', help='Image size of the 2D gradient.')
@click.option('--boundary', type=click.Choice([b.value for b in Boundary]), default=Boundary.PERIODIC.value,
              help='Boundary handling of the 2D gradient.')
@click.option('--matrix', 'matrix_path', type=click.Path(exists=True, dir_okay=False),
              help='CSV matrix: the dense operator itself, or V of the stacked operator (identity when omitted).')
@click.option('--iterations', type=click.IntRange(min=1), default=None,
              help='Power iterations for large operators; POWER_ITERATIONS when omitted.')
@click.option('--seed', type=int, default=0, help='Seed of the power-iteration start vector.')
@click.pass_context
@run_command
def spectra(ctx, kind, n, scale, size, boundary, matrix_path, iterations, seed):
    """Print ||A||, lambda_min(A A^T), hat lambda and whether A is surjective."""
    settings = ctx.obj
    op = usage_guard(_build_operator, kind, n, scale, size, boundary, matrix_path)
    bounds = spectral_bounds(op, iterations or settings.POWER_ITERATIONS, seed, settings.MATERIALIZE_CAP)

    click.echo(f'operator={op!r}')
    click.echo(f'op_norm={bounds.op_norm:.12g}')
    click.echo(f'min_eig_gram={bounds.min_eig_gram:.12g}')
    click.echo(f'hat_lambda={bounds.hat_lambda:.12g}')
    click.echo(f'surjective={"yes" if bounds.surjective else "no"}')
    if not bounds.surjective:
        click.echo(NOT_SURJECTIVE_NOTE)

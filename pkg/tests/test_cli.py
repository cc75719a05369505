"""Tests for the command-line harness."""
import csv
import math
import time

import pytest
from click.testing import CliRunner

from primaldual.cli import create_cli


@pytest.fixture
def cli():
    """Create the command group."""
    return create_cli()


@pytest.fixture
def runner():
    """Create a CLI runner."""
    return CliRunner()


@pytest.fixture
def invoke(cli, runner):
    """Run a subcommand under the testing profile."""
    def run(*args):
        return runner.invoke(cli, ['--env', 'testing', *[str(a) for a in args]])
    return run


def output_rows(result):
    """Data rows of a command's CSV-style stdout."""
    lines = [line for line in result.output.splitlines() if line and not line.startswith('sigma,')]
    return [line.split(',') for line in lines]


def read_summary(path):
    return dict(line.split('=', 1) for line in path.read_text().splitlines())


def without_comment(path):
    return [line for line in path.read_text().splitlines() if not line.startswith('#')]


def test_help(runner, cli):
    result = runner.invoke(cli, ['--help'])
    assert result.exit_code == 0
    for command in ('denoise', 'lasso', 'prox-check', 'spectra'):
        assert command in result.output


@pytest.mark.parametrize('command, shown', [
    ('denoise', ['l0-gradient denoising setting', '[default: 0.1]', '[default: -1.0]', '[default: envelope]']),
    ('lasso', ['fused-lasso setting', '[default: 0.0001]', '[default: 0.5]', '[default: normalize]']),
])
def test_subcommand_help_shows_setting_defaults(runner, cli, command, shown):
    result = runner.invoke(cli, [command, '--help'])
    assert result.exit_code == 0
    text = ' '.join(result.output.split())
    for fragment in shown:
        assert fragment in text


def test_denoise_improves_psnr(invoke, tmp_path):
    """The synthetic image comes back closer to the clean one than the noisy input."""
    result = invoke('denoise', '--synthetic', '32x32', '--sigma', 0.1, '--max-iters', 200,
                    '--output-dir', tmp_path)
    assert result.exit_code == 0, result.output
    assert result.output.splitlines()[0] == 'sigma,psnr_in,psnr_out,iters,seconds'
    (row,) = output_rows(result)
    assert float(row[2]) > float(row[1])
    for name in ('trace.csv', 'noisy.pgm', 'denoised.pgm', 'summary.txt'):
        assert (tmp_path / name).exists()

    summary = read_summary(tmp_path / 'summary.txt')
    assert summary['sigma'] == '0.10000000000000001'
    assert summary['seed'] == '1'
    assert int(summary['iters']) == int(row[3])
    trace = (tmp_path / 'trace.csv').read_text().splitlines()
    assert trace[0].startswith('# denoise ')
    assert trace[1].startswith('iter,elapsed_s,objective,')
    assert len(trace) == 2 + int(row[3])


def test_denoise_objective_descends_on_64x64(invoke, tmp_path):
    """At sigma 0.05 the traced objective almost never rises and PSNR gains 3 dB."""
    started = time.perf_counter()
    result = invoke('denoise', '--synthetic', '64x64', '--sigma', 0.05, '--seed', 1, '--max-iters', 500,
                    '--output-dir', tmp_path)
    seconds = time.perf_counter() - started
    assert result.exit_code == 0, result.output
    assert seconds < 5.0
    (row,) = output_rows(result)
    assert float(row[2]) >= float(row[1]) + 3.0

    rows = list(csv.DictReader(without_comment(tmp_path / 'trace.csv')))
    objective = [float(r['objective']) for r in rows]
    rises = sum(1 for before, after in zip(objective, objective[1:]) if after > before)
    assert 1 < len(objective) <= 500
    assert rises <= 0.05 * (len(objective) - 1)
    summary = read_summary(tmp_path / 'summary.txt')
    assert summary['trace_objective'] == 'envelope'
    assert float(summary['final_envelope_objective']) <= float(summary['final_objective'])


def test_denoise_without_noise_has_infinite_input_psnr(invoke, tmp_path):
    result = invoke('denoise', '--synthetic', '16x16', '--sigma', 0, '--max-iters', 5, '--output-dir', tmp_path)
    assert result.exit_code == 0, result.output
    (row,) = output_rows(result)
    assert math.isinf(float(row[1]))


def test_denoise_zero_iterations_keeps_noisy_image(invoke, tmp_path):
    result = invoke('denoise', '--synthetic', '16x16', '--max-iters', 0, '--output-dir', tmp_path)
    assert result.exit_code == 0, result.output
    assert (tmp_path / 'denoised.pgm').read_bytes() == (tmp_path / 'noisy.pgm').read_bytes()
    assert read_summary(tmp_path / 'summary.txt')['reason'] == 'iteration-limit'


def test_denoise_several_levels(invoke, tmp_path):
    """Each noise level gets its own directory and output row."""
    result = invoke('denoise', '--synthetic', '16x16', '--sigma', 0.05, '--sigma', 0.1,
                    '--max-iters', 10, '--output-dir', tmp_path)
    assert result.exit_code == 0, result.output
    assert [row[0] for row in output_rows(result)] == ['0.05', '0.1']
    assert (tmp_path / 'sigma-0.05' / 'summary.txt').exists()
    assert (tmp_path / 'sigma-0.1' / 'denoised.pgm').exists()


def test_denoise_is_deterministic(invoke, tmp_path):
    args = ('denoise', '--synthetic', '16x16', '--max-iters', 30, '--no-record-time', '--output-dir')
    assert invoke(*args, tmp_path / 'a').exit_code == 0
    assert invoke(*args, tmp_path / 'b').exit_code == 0
    assert without_comment(tmp_path / 'a' / 'trace.csv') == without_comment(tmp_path / 'b' / 'trace.csv')
    assert (tmp_path / 'a' / 'denoised.pgm').read_bytes() == (tmp_path / 'b' / 'denoised.pgm').read_bytes()


def test_denoise_reads_pgm_input(invoke, tmp_path):
    image = tmp_path / 'clean.pgm'
    image.write_bytes(b'P2 4 4 255\n' + b'0 0 255 255\n' * 4)
    result = invoke('denoise', '--input', image, '--max-iters', 5, '--output-dir', tmp_path / 'out')
    assert result.exit_code == 0, result.output
    assert (tmp_path / 'out' / 'denoised.pgm').exists()


@pytest.mark.parametrize('args', [
    (),
    ('--synthetic', '16x16', '--input', 'README.md'),
    ('--synthetic', 'sixteen'),
    ('--synthetic', '16x16', '--sigma', -0.1),
    ('--synthetic', '1x16'),
    ('--synthetic', '16x16', '--c1', 0.5),
    ('--input', 'does-not-exist.pgm'),
])
def test_denoise_usage_errors(invoke, tmp_path, args):
    """Bad invocations exit with code 2."""
    result = invoke('denoise', *args, '--output-dir', tmp_path)
    assert result.exit_code == 2


def test_lasso_full_batch_svrg_matches_full_estimator(invoke, tmp_path):
    """--batch N with svrg writes the same trace as --estimator full."""
    common = ('lasso', '--synthetic', '60,5', '--seeds', 1, '--max-iters', 30, '--no-record-time')
    full = invoke(*common, '--estimator', 'full', '--output-dir', tmp_path / 'full')
    svrg = invoke(*common, '--estimator', 'svrg', '--batch', 60, '--output-dir', tmp_path / 'svrg')
    assert full.exit_code == 0, full.output
    assert svrg.exit_code == 0, svrg.output
    assert (without_comment(tmp_path / 'full' / 'trace_seed0.csv')
            == without_comment(tmp_path / 'svrg' / 'trace_seed0.csv'))
    summary = read_summary(tmp_path / 'full' / 'summary.txt')
    assert summary['batch'] == '60'
    assert summary['seeds_ok'] == '1'


def test_lasso_multi_seed_run(invoke, tmp_path):
    """One trace per seed plus the aggregate and the summary."""
    result = invoke('lasso', '--synthetic', '80,6', '--estimator', 'saga', '--batch', 4, '--seeds', 3,
                    '--max-epochs', 3, '--init', 'gaussian', '--output-dir', tmp_path)
    assert result.exit_code == 0, result.output
    assert 'saga: 3/3 seeds ok' in result.output
    for seed in range(3):
        assert (tmp_path / f'trace_seed{seed}.csv').exists()
    aggregate = without_comment(tmp_path / 'aggregate.csv')
    assert aggregate[0].startswith('iter,comp_evals,mean_objective,')
    summary = read_summary(tmp_path / 'summary.txt')
    assert summary['failed_seeds'] == ''
    assert math.isfinite(float(summary['mean_relaxed_objective']))
    assert float(summary['lipschitz_L']) == pytest.approx(0.7699)


def test_lasso_reference_gap(invoke, tmp_path):
    result = invoke('lasso', '--synthetic', '60,5', '--seeds', 2, '--max-epochs', 5, '--reference',
                    '--output-dir', tmp_path)
    assert result.exit_code == 0, result.output
    assert 'relative gap' in result.output
    assert (tmp_path / 'reference.csv').exists()
    summary = read_summary(tmp_path / 'summary.txt')
    assert float(summary['relative_gap']) >= 0.0
    assert int(summary['reference_iters']) >= 1


def test_lasso_reads_libsvm_and_graph(invoke, tmp_path):
    data = tmp_path / 'data.svm'
    data.write_text(''.join(f'{1 if i % 2 else -1} 1:{0.1 * i:.1f} 2:{1 - 0.05 * i:.2f} 3:0.5\n'
                            for i in range(12)))
    graph = tmp_path / 'graph.csv'
    graph.write_text('0,1,0\n1,0,0\n0,0,0\n')
    result = invoke('lasso', '--input', data, '--graph', graph, '--seeds', 1, '--max-epochs', 2,
                    '--output-dir', tmp_path / 'out')
    assert result.exit_code == 0, result.output
    assert read_summary(tmp_path / 'out' / 'summary.txt')['batch'] == '1'


@pytest.mark.parametrize('args', [
    ('--synthetic', '60,5', '--batch', 0),
    ('--synthetic', '60,5', '--batch', 61),
    ('--synthetic', '60,5', '--period', 0),
    ('--synthetic', '60,5', '--seeds', 0),
    ('--synthetic', '60,5', '--p', 1.5),
    ('--synthetic', '60,5', '--kappa-hat', 1, '--alpha', 1),
    ('--synthetic', 'sixty'),
])
def test_lasso_usage_errors(invoke, tmp_path, args):
    result = invoke('lasso', *args, '--output-dir', tmp_path)
    assert result.exit_code == 2


def test_lasso_reports_bad_data(invoke, tmp_path):
    """Unparseable input files fail with exit code 1."""
    data = tmp_path / 'bad.svm'
    data.write_text('1 1:x\n')
    result = invoke('lasso', '--input', data, '--output-dir', tmp_path)
    assert result.exit_code == 1
    assert 'line 1' in result.output


@pytest.mark.parametrize('args', [
    ('--reg', 'l1', '--lambda', 2),
    ('--reg', 'scad', '--gamma', 3, '--r', 0.5),
    ('--reg', 'l0'),
    ('--reg', 'lp'),
])
def test_prox_check_passes(invoke, args):
    result = invoke('prox-check', *args, '--points', 40, '--conj-points', 20)
    assert result.exit_code == 0, result.output
    assert result.output.splitlines()[-1] == 'pass'


def test_prox_check_l1_runs_moreau_check(invoke):
    result = invoke('prox-check', '--reg', 'l1', '--points', 20, '--conj-points', 10)
    assert 'moreau max error' in result.output


def test_prox_check_rejects_bad_parameters(invoke):
    """gamma <= 2 is a usage error."""
    assert invoke('prox-check', '--reg', 'scad', '--gamma', 2).exit_code == 2
    assert invoke('prox-check', '--reg', 'l1', '--lambda', -1).exit_code == 2


def test_prox_check_fails_on_tight_tolerance(invoke):
    """A coarse oracle grid cannot meet a tiny tolerance; the command exits 1."""
    result = invoke('prox-check', '--reg', 'lp', '--points', 20, '--conj-points', 10,
                    '--grid-step', 0.05, '--tolerance', 1e-12)
    assert result.exit_code == 1
    assert result.output.splitlines()[-1] == 'fail'


def spectra_values(result):
    return dict(line.split('=', 1) for line in result.output.splitlines() if '=' in line and ' ' not in line)


def test_spectra_identity(invoke):
    result = invoke('spectra', '--operator', 'identity', '--n', 3)
    assert result.exit_code == 0, result.output
    values = spectra_values(result)
    assert float(values['op_norm']) == 1.0
    assert float(values['hat_lambda']) == 1.0
    assert values['surjective'] == 'yes'


def test_spectra_gradient_is_not_surjective(invoke):
    result = invoke('spectra', '--operator', 'gradient-2d', '--size', '8x8')
    assert result.exit_code == 0, result.output
    values = spectra_values(result)
    assert float(values['op_norm']) ** 2 == pytest.approx(8.0, abs=1e-8)
    assert values['surjective'] == 'no'
    assert 'not surjective' in result.output


def test_spectra_stacked_identity(invoke):
    """[I; I] has norm sqrt(2) and a singular gram matrix."""
    values = spectra_values(invoke('spectra', '--operator', 'stacked', '--n', 4))
    assert float(values['op_norm']) == pytest.approx(math.sqrt(2.0))
    assert values['surjective'] == 'no'


def test_spectra_dense_matrix(invoke, tmp_path):
    matrix = tmp_path / 'm.csv'
    matrix.write_text('1,0\n0,2\n')
    values = spectra_values(invoke('spectra', '--operator', 'dense', '--matrix', matrix))
    assert float(values['op_norm']) == pytest.approx(2.0)
    assert float(values['min_eig_gram']) == pytest.approx(1.0)
    assert invoke('spectra', '--operator', 'dense').exit_code == 2

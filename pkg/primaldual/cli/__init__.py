"""Command-line harness for the denoising and fused-lasso experiments and the verification tools."""
import click

from primaldual import configure


def create_cli():
    """Create the command group and register the subcommands."""

    @click.group(context_settings={'help_option_names': ['-h', '--help'], 'show_default': True})
    @click.option('--env', 'config_name', default=None,
                  type=click.Choice(['development', 'benchmark', 'testing', 'default']),
                  help='Configuration profile; PRIMALDUAL_ENV when omitted.')
    @click.pass_context
    def cli(ctx, config_name):
        """Preconditioned primal-dual gradient methods for nonconvex composite problems."""
        ctx.obj = configure(config_name)

    from primaldual.cli.denoise import denoise
    cli.add_command(denoise)

    from primaldual.cli.lasso import lasso
    cli.add_command(lasso)

    from primaldual.cli.verify import prox_check, spectra
    cli.add_command(prox_check)
    cli.add_command(spectra)

    return cli


cli = create_cli()

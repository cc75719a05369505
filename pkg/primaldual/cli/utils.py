"""Helpers shared by the commands."""
import functools
import logging
from pathlib import Path

import click

from primaldual.errors import PrimalDualError

logger = logging.getLogger(__name__)


def run_command(func):
    """Map toolkit and I/O errors to exit code 1; usage errors keep click's exit code 2."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except click.ClickException:
            raise
        except (PrimalDualError, OSError) as e:
            logger.debug('command failed', exc_info=True)
            raise click.ClickException(str(e)) from e
    return wrapper


def usage_guard(build, *args, **kwargs):
    """Call a builder and turn its parameter errors into usage errors."""
    try:
        return build(*args, **kwargs)
    except (PrimalDualError, ValueError) as e:
        raise click.UsageError(str(e)) from e


def flag_line(ctx):
    """The invocation as ``command --flag=value ...`` for trace headers."""
    parts = [ctx.command_path]
    for name in sorted(ctx.params):
        value = ctx.params[name]
        if isinstance(value, (list, tuple)):
            value = ','.join(str(v) for v in value)
        parts.append(f'--{name.replace("_", "-")}={value}')
    return ' '.join(parts)


def parse_shape(value, separator='x'):
    """'64x48' -> (64, 48)."""
    try:
        first, second = (int(part) for part in value.lower().split(separator))
    except ValueError:
        raise click.BadParameter(f'expected two integers like 64{separator}64, got {value!r}') from None
    if first < 1 or second < 1:
        raise click.BadParameter(f'sizes must be positive, got {value!r}')
    return first, second


def prepare_output(path):
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path

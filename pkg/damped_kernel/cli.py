"""
Main CLI for damped-kernel.

Combines all subcommands: kernel, converge, evolve, compare, check
"""

import click
import colorama
from dotenv import load_dotenv

from damped_kernel import __version__
from damped_kernel.cli_run import check, compare, converge, evolve, kernel

# Coloured status lines on Windows consoles too
colorama.just_fix_windows_console()


@click.group()
@click.version_option(version=__version__, prog_name='damped-kernel')
def cli():
    """Damped free particle: time-sliced path integral, kernel and wave packets."""
    # DAMPED_KERNEL_* variables may come from a local .env file
    load_dotenv()


cli.add_command(kernel, 'kernel')
cli.add_command(converge, 'converge')
cli.add_command(evolve, 'evolve')
cli.add_command(compare, 'compare')
cli.add_command(check, 'check')


if __name__ == '__main__':
    cli()

"""
Command-line application factory
"""
import logging

import click

from hardygap.cli.commands import constants, gap, hardy, indicial, sweep, verify
from hardygap.core.config import settings
from hardygap.core.exceptions import HandledGroup, add_exception_handlers

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(verbose: bool = False):
    level = logging.DEBUG if verbose else getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)


def create_cli() -> HandledGroup:
    """Create and configure the command group"""

    @click.group(cls=HandledGroup, help=settings.DESCRIPTION)
    @click.version_option(settings.VERSION, prog_name=settings.PROJECT_NAME)
    @click.option("--verbose", "-v", is_flag=True, help="Log at DEBUG level.")
    def cli(verbose):
        configure_logging(verbose)

    # Add exception handlers
    add_exception_handlers(cli)

    # Register commands
    cli.add_command(constants.constants)
    cli.add_command(indicial.indicial)
    cli.add_command(hardy.hardy)
    cli.add_command(gap.gap)
    cli.add_command(verify.verify)
    cli.add_command(sweep.sweep)

    return cli

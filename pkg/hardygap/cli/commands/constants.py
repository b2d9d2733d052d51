"""
Closed-form constants and regime
"""
import click

from hardygap.cli.options import config_option, emit, format_option, out_option, parameter_overrides, resolve_config
from hardygap.services.hardy_service import hardy_service


@click.command("constants")
@config_option
@parameter_overrides
@out_option
@format_option
def constants(config_path, alpha, p, dim, out_dir, fmt):
    """c_{alpha,p,1}, c_{alpha,p,N}, their minimum and the regime of alpha + p."""
    config = resolve_config(config_path, alpha, p, dim)
    emit(hardy_service.constants(config), out_dir, fmt)

"""
Indicial roots table
"""
import click

from hardygap.cli.options import config_option, emit, format_option, out_option, parameter_overrides, resolve_config
from hardygap.services.hardy_service import hardy_service


@click.command("indicial")
@config_option
@parameter_overrides
@click.option("--mu", "mu", type=float, multiple=True, help="Target value; repeat for several.")
@out_option
@format_option
def indicial(config_path, alpha, p, dim, mu, out_dir, fmt):
    """Roots of the indicial equations at the boundary and at infinity."""
    config = resolve_config(config_path, alpha, p, dim)
    if mu:
        config = config.model_copy(update={"indicial": config.indicial.model_copy(update={"mu": list(mu)})})
    emit(hardy_service.indicial(config), out_dir, fmt)

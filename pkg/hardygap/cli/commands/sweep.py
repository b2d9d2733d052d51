"""
Batch sweep over (alpha, p)
"""
import click

from hardygap.cli.options import config_option, jobs_option, out_option, output_dir, plots_option, resolve_config
from hardygap.services.sweep_service import sweep_service


@click.command("sweep")
@config_option
@out_option
@plots_option
@jobs_option
def sweep(config_path, out_dir, plots, jobs):
    """One CSV row per grid point, in grid order."""
    config = resolve_config(config_path)
    rows = sweep_service.run(config, jobs)
    for path in sweep_service.write(rows, output_dir(out_dir), plots):
        click.echo(str(path))

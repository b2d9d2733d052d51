"""
Hardy constant study
"""
import click

from hardygap.cli.options import (
    config_option,
    emit,
    format_option,
    jobs_option,
    out_option,
    output_dir,
    parameter_overrides,
    plots_option,
    resolve_config,
)
from hardygap.services.hardy_service import HardyService, hardy_service, raise_on_unconverged


@click.command("hardy")
@config_option
@parameter_overrides
@out_option
@format_option
@plots_option
@jobs_option
def hardy(config_path, alpha, p, dim, out_dir, fmt, plots, jobs):
    """Extrapolated upper bound for H with minimizer profile and decay fit."""
    config = resolve_config(config_path, alpha, p, dim)
    service = HardyService(jobs) if jobs else hardy_service
    document = service.hardy(config, output_dir(out_dir) / "plots" if plots else None)
    emit(document, out_dir, fmt)
    raise_on_unconverged(document)

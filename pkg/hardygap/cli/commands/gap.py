"""
Spectral gap classification
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


@click.command("gap")
@config_option
@parameter_overrides
@click.option("--h", "h_input", type=float, default=None, help="Externally computed H; skips the quotient study.")
@click.option("--h-error", type=click.FloatRange(min=0.0), default=None, help="Error estimate of --h.")
@out_option
@format_option
@plots_option
@jobs_option
def gap(config_path, alpha, p, dim, h_input, h_error, out_dir, fmt, plots, jobs):
    """Gap, minimizer existence, criticality and decay exponents."""
    config = resolve_config(config_path, alpha, p, dim)
    updates = {k: v for k, v in (("h_input", h_input), ("h_error", h_error)) if v is not None}
    if updates:
        config = config.model_copy(update={"gap": config.gap.model_copy(update=updates)})
    service = HardyService(jobs) if jobs else hardy_service
    document = service.gap(config, output_dir(out_dir) / "plots" if plots else None)
    emit(document, out_dir, fmt)
    raise_on_unconverged(document)

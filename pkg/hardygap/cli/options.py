"""
Options shared by the commands
"""
from pathlib import Path
from typing import Optional

import click

from hardygap.core.config import settings
from hardygap.models.report import ReportDocument
from hardygap.models.run_config import RunConfig
from hardygap.services.config_loader import load_run_config
from hardygap.services.report_service import report_service

config_option = click.option(
    "--config", "config_path", type=click.Path(dir_okay=False, path_type=Path), default=None,
    help="YAML run configuration; defaults to Annulus(1,2), alpha=0, p=2, N=2.",
)
out_option = click.option(
    "--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), default=None,
    help=f"Output directory (default: {settings.OUTPUT_DIR}).",
)
format_option = click.option(
    "--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True,
    help="Report format.",
)
plots_option = click.option("--plots", is_flag=True, help="Write SVG plots next to the report.")
jobs_option = click.option("--jobs", type=click.IntRange(min=1), default=None,
                           help=f"Worker threads (default: {settings.MAX_WORKERS}).")


def parameter_overrides(command):
    """--alpha/--p/--dim on top of the configuration file"""
    command = click.option("--dim", type=int, default=None, help="Override the dimension N.")(command)
    command = click.option("--p", "p", type=float, default=None, help="Override p.")(command)
    command = click.option("--alpha", type=float, default=None, help="Override alpha.")(command)
    return command


def resolve_config(config_path: Optional[Path], alpha: Optional[float] = None, p: Optional[float] = None,
                   dim: Optional[int] = None) -> RunConfig:
    config = load_run_config(config_path)
    updates = {k: v for k, v in (("alpha", alpha), ("p", p), ("dim", dim)) if v is not None}
    if updates:
        # Revalidate so overrides go through the same field checks as the file.
        config = RunConfig.model_validate({**config.model_dump(), **updates})
    return config


def output_dir(out_dir: Optional[Path]) -> Path:
    return Path(out_dir or settings.OUTPUT_DIR)


def emit(document: ReportDocument, out_dir: Optional[Path], fmt: str) -> Path:
    path = report_service.write(document, output_dir(out_dir), fmt)
    click.echo(str(path))
    return path

"""
Property verification suites
"""
import click

from hardygap.cli.options import config_option, emit, format_option, out_option, resolve_config
from hardygap.services.config_loader import run_config_to_dict
from hardygap.services.report_service import report_service
from hardygap.services.verification import raise_on_failures, verification_service


@click.command("verify")
@config_option
@click.option("--suite", "suites", multiple=True,
              help=f"Suite to run; repeat for several (default: all of {', '.join(verification_service.suites)}).")
@click.option("--seed", type=int, default=None, help="Seed of the sampling suites.")
@click.option("--samples", type=click.IntRange(min=1), default=None, help="Sample count of the cross-term suite.")
@out_option
@format_option
def verify(config_path, suites, seed, samples, out_dir, fmt):
    """Run the property suites; exit status 3 when any check fails."""
    config = resolve_config(config_path)
    updates = {k: v for k, v in (("seed", seed), ("samples", samples)) if v is not None}
    if suites:
        updates["suites"] = list(suites)
    options = config.verify.model_copy(update=updates)
    checks = verification_service.run(options)
    failed = [c for c in checks if not c.passed]
    results = {
        "passed": len(checks) - len(failed),
        "failed": len(failed),
        "suites": verification_service.resolve(options.suites),
        "checks": checks,
    }
    document = report_service.build("verify", run_config_to_dict(config), results)
    emit(document, out_dir, fmt)
    raise_on_failures(checks)

"""
Custom exceptions and exception handlers
"""
import logging
from typing import Any, Callable, Dict, Optional, Type

import click
from pydantic import ValidationError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_SOLVER_NON_CONVERGENCE = 2
EXIT_VERIFICATION_FAILURE = 3


class HardyError(Exception):
    """Base class for all library errors"""
    def __init__(self, message: str, details: Any = None):
        self.message = message
        self.details = details
        super().__init__(self.message)


class ParameterError(HardyError):
    """Invalid parameters, domain descriptors or admissible ranges"""


class ConfigError(HardyError):
    """Run configuration could not be read or validated"""


class HypothesisError(HardyError):
    """Exponent hypotheses of a sub/supersolution construction are violated"""
    def __init__(self, message: str, clause: str, details: Any = None):
        self.clause = clause
        super().__init__(message, details)


class UndefinedPointError(HardyError):
    """Operator evaluated at a kink radius or a degenerate-gradient point"""
    def __init__(self, message: str, radius: Optional[float] = None):
        self.radius = radius
        super().__init__(message, {"radius": radius})


class DivergentIntegralError(HardyError):
    """Weighted integral is not finite for the requested configuration"""


class QuadratureOverflowError(HardyError):
    """Non-finite quadrature value near a singular weight"""
    def __init__(self, message: str, element: Optional[int] = None):
        self.element = element
        super().__init__(message, {"element": element})


class CollarTooThinError(HardyError):
    """Collar holds too few mesh nodes to support a test function"""


class InconsistentInputError(HardyError):
    """Numeric input contradicts an exact relation (H above the constant at infinity)"""


class SolverConvergenceError(HardyError):
    """Minimization did not converge within the iteration budget"""
    def __init__(self, message: str, best: Any = None):
        self.best = best
        super().__init__(message, None)


class VerificationFailure(HardyError):
    """One or more verification checks failed"""
    def __init__(self, message: str, failed: Optional[list] = None):
        self.failed = failed or []
        super().__init__(message, self.failed)


def config_exception_handler(exc: Exception) -> int:
    """Handle configuration and parameter errors"""
    logger.error(f"Configuration error: {exc}")
    click.echo(f"error: {exc}", err=True)
    return EXIT_CONFIG_ERROR


def solver_exception_handler(exc: SolverConvergenceError) -> int:
    """Handle solver non-convergence"""
    logger.error(f"Solver did not converge: {exc.message}")
    click.echo(f"solver error: {exc.message}", err=True)
    return EXIT_SOLVER_NON_CONVERGENCE


def verification_exception_handler(exc: VerificationFailure) -> int:
    """Handle failed verification suites"""
    logger.error(f"Verification failed: {exc.message} ({len(exc.failed)} failing checks)")
    for name in exc.failed:
        click.echo(f"FAILED {name}", err=True)
    return EXIT_VERIFICATION_FAILURE


def hardy_exception_handler(exc: HardyError) -> int:
    """Handle any other library error"""
    logger.error(f"{type(exc).__name__}: {exc.message}")
    click.echo(f"error: {exc.message}", err=True)
    return EXIT_CONFIG_ERROR


def general_exception_handler(exc: Exception) -> int:
    """Handle unexpected exceptions"""
    logger.error(f"Unexpected error: {str(exc)}", exc_info=True)
    click.echo("error: an unexpected error occurred", err=True)
    return EXIT_CONFIG_ERROR


Handler = Callable[[Exception], int]


class HandledGroup(click.Group):
    """Click group that routes exceptions raised by commands to registered handlers"""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.exception_handlers: Dict[Type[BaseException], Handler] = {}

    def add_exception_handler(self, exc_class: Type[BaseException], handler: Handler):
        self.exception_handlers[exc_class] = handler

    def resolve_handler(self, exc: BaseException) -> Handler:
        # Most specific registered class wins.
        for klass in type(exc).__mro__:
            if klass in self.exception_handlers:
                return self.exception_handlers[klass]
        return general_exception_handler

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except (click.exceptions.Exit, click.ClickException, click.Abort):
            raise
        except Exception as exc:
            code = self.resolve_handler(exc)(exc)
            ctx.exit(code)


def add_exception_handlers(cli: HandledGroup):
    """Add all exception handlers to the CLI group"""
    cli.add_exception_handler(ConfigError, config_exception_handler)
    cli.add_exception_handler(ParameterError, config_exception_handler)
    cli.add_exception_handler(ValidationError, config_exception_handler)
    cli.add_exception_handler(SolverConvergenceError, solver_exception_handler)
    cli.add_exception_handler(VerificationFailure, verification_exception_handler)
    cli.add_exception_handler(HardyError, hardy_exception_handler)
    cli.add_exception_handler(Exception, general_exception_handler)

"""
Indicial functions, their monotone root intervals and the cross-term inequality
"""
import logging
from typing import Union

import numpy as np

from hardygap.core.config import settings
from hardygap.core.exceptions import HypothesisError, ParameterError
from hardygap.models.params import (
    IndicialProblem,
    Location,
    MonotoneDirection,
    Params,
    RootInterval,
)
from hardygap.services.constants import c_const

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


def _signed_power(nu: ArrayLike, exponent: float) -> ArrayLike:
    """|nu|^exponent * sign(nu), extended by 0 at nu = 0"""
    nu = np.asarray(nu, dtype=float)
    return np.sign(nu) * np.abs(nu) ** exponent


def lambda_boundary(params: Params, nu: ArrayLike) -> ArrayLike:
    """lambda_nu = |nu|^(p-2) nu [alpha + (1 - nu)(p - 1)]"""
    p = params.p
    value = _signed_power(nu, p - 1.0) * (params.alpha + (1.0 - np.asarray(nu, dtype=float)) * (p - 1.0))
    return float(value) if np.ndim(value) == 0 else value


def lambda_infinity(params: Params, nu: ArrayLike) -> ArrayLike:
    """hat lambda_nu = |nu|^(p-2) nu [(alpha - N + 1) + (1 - nu)(p - 1)]"""
    p = params.p
    shifted = params.alpha - params.dim + 1.0
    value = _signed_power(nu, p - 1.0) * (shifted + (1.0 - np.asarray(nu, dtype=float)) * (p - 1.0))
    return float(value) if np.ndim(value) == 0 else value


def indicial_function(params: Params, location: Location):
    if location == Location.BOUNDARY:
        return lambda nu: lambda_boundary(params, nu)
    return lambda nu: lambda_infinity(params, nu)


def target_constant(params: Params, location: Location) -> float:
    """c_{alpha,p,1} at the boundary, c_{alpha,p,N} at infinity"""
    return c_const(params, 1 if location == Location.BOUNDARY else params.dim)


def root_interval(params: Params, location: Location) -> RootInterval:
    """Monotone interval of the indicial function whose image is [0, c]"""
    p = params.p
    if location == Location.BOUNDARY:
        a = params.alpha + p - 1.0
        if a > 0:
            return RootInterval(lo=a / p, hi=a / (p - 1.0), monotone_direction=MonotoneDirection.DECREASING)
        return RootInterval(lo=a / p, hi=0.0, monotone_direction=MonotoneDirection.DECREASING)
    a = params.alpha + p - params.dim
    if a < 0:
        return RootInterval(lo=a / (p - 1.0), hi=a / p, monotone_direction=MonotoneDirection.INCREASING)
    return RootInterval(lo=0.0, hi=a / p, monotone_direction=MonotoneDirection.INCREASING)


def indicial_root(problem: IndicialProblem) -> float:
    """Root of lambda(nu) = mu inside the monotone interval, by bisection"""
    params = problem.params
    c = target_constant(params, problem.location)
    mu = problem.mu
    if mu < 0.0 or mu > c:
        overshoot = -mu if mu < 0.0 else mu - c
        if overshoot > settings.MU_CLAMP:
            raise ParameterError(
                f"mu={mu!r} outside [0, {c!r}] at {problem.location.value}",
                {"mu": mu, "c": c},
            )
        mu = min(max(mu, 0.0), c)
    if c == 0.0 and mu > 0.0:
        raise ParameterError(f"degenerate constant c=0 admits only mu=0, got {mu!r}")

    interval = root_interval(params, problem.location)
    f = indicial_function(params, problem.location)
    # Extremal end where lambda attains c.
    if problem.location == Location.BOUNDARY:
        top, bottom = interval.lo, interval.hi
    else:
        top, bottom = interval.hi, interval.lo
    if mu == c:
        return top
    if mu == 0.0:
        return bottom

    # g(top) = c - mu > 0 and g(bottom) = -mu < 0 on a monotone branch.
    lo, hi = top, bottom
    for _ in range(settings.ROOT_MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        g = f(mid) - mu
        if abs(g) <= settings.ROOT_TOL and abs(hi - lo) <= settings.ROOT_TOL * max(1.0, abs(mid)):
            return mid
        if g > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def cross_term_margin(params: Params, nu: ArrayLike, beta: ArrayLike, location: Location) -> ArrayLike:
    """lambda_nu (p-1) - (p-2) lambda_nu beta/nu - lambda_beta |nu|^(p-2)/|beta|^(p-2)

    Positive exactly when the cross-term inequality holds. Vectorized.
    """
    p = params.p
    nu = np.asarray(nu, dtype=float)
    beta = np.asarray(beta, dtype=float)
    lam = indicial_function(params, location)
    lam_nu = lam(nu)
    lam_beta = lam(beta)
    ratio = (np.abs(nu) / np.abs(beta)) ** (p - 2.0)
    margin = lam_nu * (p - 1.0) - (p - 2.0) * lam_nu * beta / nu - lam_beta * ratio
    return float(margin) if np.ndim(margin) == 0 else margin


def check_cross_term_hypotheses(params: Params, nu: float, beta: float, location: Location) -> None:
    """Raise HypothesisError naming the first failing clause"""
    if nu == 0.0:
        raise HypothesisError("nu must be nonzero", clause="nu!=0")
    if beta == 0.0:
        raise HypothesisError("beta must be nonzero", clause="beta!=0")
    if location == Location.BOUNDARY and abs(params.alpha_plus_p - 1.0) <= settings.EQ_TOLERANCE:
        raise HypothesisError("boundary inequality requires alpha+p != 1", clause="alpha+p!=1")
    if location == Location.INFINITY and abs(params.alpha_plus_p - params.dim) <= settings.EQ_TOLERANCE:
        raise HypothesisError("infinity inequality requires alpha+p != N", clause="alpha+p!=N")
    interval = root_interval(params, location)
    if not interval.contains(nu):
        raise HypothesisError(
            f"nu={nu!r} outside [{interval.lo!r}, {interval.hi!r}]",
            clause="nu in interval",
        )
    if location == Location.BOUNDARY:
        if not nu < beta:
            raise HypothesisError(f"boundary case requires nu < beta, got nu={nu!r}, beta={beta!r}", clause="nu<beta")
        if not interval.contains(beta):
            raise HypothesisError(
                f"beta={beta!r} outside [{interval.lo!r}, {interval.hi!r}]",
                clause="beta in interval",
            )
    elif not beta < nu:
        raise HypothesisError(f"infinity case requires beta < nu, got nu={nu!r}, beta={beta!r}", clause="beta<nu")


def check_cross_term(params: Params, nu: float, beta: float, location: Location) -> bool:
    """Strict cross-term inequality for a hypothesis-satisfying pair"""
    check_cross_term_hypotheses(params, nu, beta, location)
    return cross_term_margin(params, nu, beta, location) > 0.0

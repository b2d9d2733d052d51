"""
Closed-form Hardy constants and regime detection
"""
from typing import Optional

from hardygap.core.config import settings
from hardygap.core.exceptions import ParameterError
from hardygap.models.params import Params, Regime, RegimeClass


def c_const(params: Params, m: int) -> float:
    """c_{alpha,p,m} = |(alpha + p - m) / p|^p for m in {1, N}"""
    if m not in (1, params.dim):
        raise ParameterError(f"m must be 1 or N={params.dim}, got {m}")
    numerator = params.alpha + params.p - m
    if numerator == 0.0:
        return 0.0
    return abs(numerator / params.p) ** params.p


def c_min(params: Params) -> float:
    """c_{alpha,p} = min(c_{alpha,p,1}, c_{alpha,p,N})"""
    return min(c_const(params, 1), c_const(params, params.dim))


def half_space_constant(params: Params) -> float:
    """Sharp constant of the half-space and of the half-line model"""
    return c_const(params, 1)


def classify_regime(params: Params, eq_tolerance: Optional[float] = None) -> Regime:
    """Case split on alpha + p with a declared equality threshold"""
    tol = settings.EQ_TOLERANCE if eq_tolerance is None else eq_tolerance
    s = params.alpha_plus_p
    n = params.dim
    if abs(s - 1.0) <= tol:
        boundary_class = RegimeClass.EQ1
    elif abs(s - n) <= tol:
        boundary_class = RegimeClass.EQN
    elif s < 1.0:
        boundary_class = RegimeClass.SUB1
    elif s < n:
        boundary_class = RegimeClass.BETWEEN
    else:
        boundary_class = RegimeClass.SUPN
    return Regime(boundary_class=boundary_class, eq_tolerance=tol)

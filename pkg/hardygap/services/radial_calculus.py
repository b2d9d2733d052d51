"""
Radial (alpha,p)-Laplacian, residuals, sign checks and weighted integrals
"""
import logging
import math
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from hardygap.core.config import settings
from hardygap.core.exceptions import (
    DivergentIntegralError,
    HypothesisError,
    ParameterError,
    UndefinedPointError,
)
from hardygap.models.params import DomainKind, Location, Params, Sign
from hardygap.models.results import AgmonQuotient, IntegrabilityVerdict, SignCheckReport
from hardygap.services.constants import c_const
from hardygap.services.geometry import Branch, DistanceProfile, RadialFn
from hardygap.services.indicial import lambda_boundary, lambda_infinity, root_interval

logger = logging.getLogger(__name__)

KAPPA_TOL = 1e-6
SIGN_REL_TOL = 1e-9


def _ip(x, p: float):
    """I_p(x) = |x|^(p-2) x"""
    return np.sign(x) * np.abs(x) ** (p - 1.0)


def _check_points(profile: DistanceProfile, r: np.ndarray, half_width: Optional[np.ndarray] = None):
    lo, hi = profile.domain
    if np.any(r <= lo) or np.any(r >= hi):
        raise UndefinedPointError(f"radius outside the domain ({lo}, {hi})", float(np.atleast_1d(r)[0]))
    for kink in profile.kink_radii:
        reach = 0.0 if half_width is None else half_width
        hit = np.abs(r - kink) <= np.maximum(reach, 1e-14 * max(1.0, kink))
        if np.any(hit):
            raise UndefinedPointError(f"distance function has a kink at r={kink}", kink)


def _fd_laplacian(profile: DistanceProfile, f: Callable, params: Params, r: np.ndarray,
                  rel_step: float) -> np.ndarray:
    """Flux-form central differences; O(h^2) with h = rel_step * delta(r)"""
    p, alpha = params.p, params.alpha
    h = rel_step * profile.delta(r)
    _check_points(profile, r, h)
    f0, fp, fm = f(r), f(r + h), f(r - h)
    slope_right = (fp - f0) / h
    slope_left = (f0 - fm) / h
    if p < 2.0 and (np.any(slope_right == 0.0) or np.any(slope_left == 0.0)):
        raise UndefinedPointError("degenerate gradient for p < 2", float(np.atleast_1d(r)[0]))
    right, left = r + 0.5 * h, r - 0.5 * h
    flux_right = profile.weight(right) * profile.delta(right) ** (-alpha) * _ip(slope_right, p)
    flux_left = profile.weight(left) * profile.delta(left) ** (-alpha) * _ip(slope_left, p)
    return (flux_right - flux_left) / (h * profile.weight(r))


def radial_alpha_p_laplacian(profile: DistanceProfile, f: RadialFn, params: Params, r,
                             rel_step: Optional[float] = None):
    """Delta_{alpha,p} f = w^-1 (w delta^-alpha |f'|^(p-2) f')' at radius r"""
    r = np.asarray(r, dtype=float)
    if not f.analytic:
        value = _fd_laplacian(profile, f, params, r, settings.FD_REL_STEP if rel_step is None else rel_step)
        return float(value) if value.ndim == 0 else value

    _check_points(profile, r)
    p, alpha = params.p, params.alpha
    _, df, d2f = f.evaluate(r)
    df = np.broadcast_to(df, r.shape)
    if p < 2.0 and np.any(df == 0.0):
        raise UndefinedPointError("degenerate gradient for p < 2", float(np.atleast_1d(r)[0]))
    delta = profile.delta(r)
    drift = profile.log_weight_derivative(r) - alpha * profile.ddelta(r) / delta
    value = delta ** (-alpha) * np.abs(df) ** (p - 2.0) * ((p - 1.0) * d2f + df * drift)
    return float(value) if np.ndim(value) == 0 else value


def residual(profile: DistanceProfile, f: RadialFn, params: Params, lam: float, r,
             rel_step: Optional[float] = None):
    """-Delta_{alpha,p} f - lam delta^-(alpha+p) |f|^(p-2) f"""
    r = np.asarray(r, dtype=float)
    lap = radial_alpha_p_laplacian(profile, f, params, r, rel_step)
    potential = lam * profile.delta(r) ** (-(params.alpha + params.p)) * _ip(f(r), params.p)
    value = -np.asarray(lap) - potential
    return float(value) if np.ndim(value) == 0 else value


def _residual_scale(profile: DistanceProfile, f: RadialFn, params: Params, lam: float, r: np.ndarray):
    """Magnitude of the individual residual terms, for roundoff-aware sign tests"""
    p, alpha = params.p, params.alpha
    u, du, d2u = f.evaluate(r)
    delta = profile.delta(r)
    flux_terms = delta ** (-alpha) * np.abs(du) ** (p - 2.0) * (
        (p - 1.0) * np.abs(d2u) + np.abs(du) * (np.abs(profile.log_weight_derivative(r)) + abs(alpha) / delta)
    )
    return flux_terms + abs(lam) * delta ** (-(alpha + p)) * np.abs(u) ** (p - 1.0)


def _scan_sign(profile: DistanceProfile, f: RadialFn, params: Params, lam: float,
               radii: np.ndarray, nonnegative: bool):
    """Residuals on radii ordered from the singular end outward"""
    res = np.asarray(residual(profile, f, params, lam, radii))
    tol = SIGN_REL_TOL * _residual_scale(profile, f, params, lam, radii)
    ok = res >= -tol if nonnegative else res <= tol
    failing = np.flatnonzero(~ok)
    prefix = len(radii) if failing.size == 0 else int(failing[0])
    threshold = float(radii[prefix - 1]) if prefix > 0 else None
    return res, bool(ok.all()), threshold


def _window_samples(profile: DistanceProfile, window: Tuple[float, float], location: Location,
                    samples: int) -> np.ndarray:
    lo, hi = float(min(window)), float(max(window))
    if min(float(profile.delta(lo)), float(profile.delta(hi))) <= 0.0:
        raise ParameterError(f"sign window {window!r} touches the boundary or leaves the domain",
                             {"window": [lo, hi]})
    if location == Location.INFINITY:
        radii = np.geomspace(hi, lo, samples)
    else:
        branch = profile.branch_at(0.5 * (lo + hi))
        d_lo, d_hi = sorted((float(profile.delta(lo)), float(profile.delta(hi))))
        for kink in profile.kink_radii:
            if lo < kink < hi:
                raise UndefinedPointError("sign window crosses a kink of the distance function", kink)
        radii = branch.radius(np.geomspace(d_lo, d_hi, samples))
    return radii


def default_window(profile: DistanceProfile, location: Location) -> Tuple[float, float]:
    """Collar next to the first boundary, or a tail beyond the inner radius"""
    if location == Location.INFINITY:
        radius = profile.spec.inner
        return radius * 1.01, radius * 1e3
    branch = profile.branches[0]
    depth = min(branch.depth * 0.5, 0.5)
    return tuple(sorted((float(branch.radius(1e-10)), float(branch.radius(depth)))))


def _check_sign_hypotheses(params: Params, nu: float, beta: float, location: Location) -> None:
    interval = root_interval(params, location)
    if location == Location.BOUNDARY:
        if abs(params.alpha_plus_p - 1.0) <= settings.EQ_TOLERANCE:
            raise HypothesisError("boundary construction requires alpha+p != 1", clause="alpha+p!=1")
        if not interval.contains(nu):
            raise HypothesisError(f"nu={nu!r} outside [{interval.lo!r}, {interval.hi!r}]", clause="nu in interval")
        if not interval.contains(beta):
            raise HypothesisError(f"beta={beta!r} outside [{interval.lo!r}, {interval.hi!r}]", clause="beta in interval")
        if not nu < beta < nu + 1.0:
            raise HypothesisError(f"requires nu < beta < nu + 1, got nu={nu!r}, beta={beta!r}", clause="nu<beta<nu+1")
    else:
        if abs(params.alpha_plus_p - params.dim) <= settings.EQ_TOLERANCE:
            raise HypothesisError("infinity construction requires alpha+p != N", clause="alpha+p!=N")
        if not interval.contains(nu):
            raise HypothesisError(f"nu={nu!r} outside [{interval.lo!r}, {interval.hi!r}]", clause="nu in interval")
        if not beta < nu < beta + 1.0:
            raise HypothesisError(f"requires beta < nu < beta + 1, got nu={nu!r}, beta={beta!r}", clause="beta<nu<beta+1")


def subsupersolution_sign_check(profile: DistanceProfile, params: Params, nu: float, beta: float,
                                location: Location, sign: Sign,
                                radius_window: Optional[Tuple[float, float]] = None,
                                samples: int = 400, enforce_hypotheses: bool = True) -> SignCheckReport:
    """Residual sign of delta^nu +- delta^beta (boundary) or r^nu +- r^beta (infinity)

    Plus is expected to be a subsolution (residual <= 0), Minus a
    supersolution (residual >= 0), with lambda = lambda_nu or hat lambda_nu.
    """
    if location == Location.INFINITY and not profile.spec.is_exterior:
        raise ParameterError("infinity candidates need an exterior domain")
    if enforce_hypotheses:
        _check_sign_hypotheses(params, nu, beta, location)
    window = radius_window or default_window(profile, location)
    radii = _window_samples(profile, window, location, samples)

    coeff = 1.0 if sign == Sign.PLUS else -1.0
    if location == Location.BOUNDARY:
        lam = lambda_boundary(params, nu)
        fn = RadialFn.distance_combination(profile, [(1.0, nu), (coeff, beta)])
    else:
        lam = lambda_infinity(params, nu)
        fn = RadialFn.radius_combination([(1.0, nu), (coeff, beta)], profile.domain)
    if sign == Sign.MINUS and np.any(fn(radii) <= 0.0):
        raise HypothesisError("Minus candidate is not positive on the window", clause="U>0")

    nonnegative = sign == Sign.MINUS
    res, holds, threshold = _scan_sign(profile, fn, params, lam, radii, nonnegative)
    report = SignCheckReport(
        location=location, sign=sign, nu=nu, beta=beta, lam=float(lam),
        window=(float(min(window)), float(max(window))), samples=len(radii),
        expected="nonnegative" if nonnegative else "nonpositive",
        min_residual=float(res.min()), max_residual=float(res.max()),
        holds=holds, threshold_radius=threshold, hypotheses_enforced=enforce_hypotheses,
    )
    logger.debug(f"sign check {location.value}/{sign.value} nu={nu} beta={beta}: holds={holds}")
    return report


def convexity_supersolution_check(profile: DistanceProfile, params: Params,
                                  radius_window: Optional[Tuple[float, float]] = None,
                                  samples: int = 400) -> SignCheckReport:
    """delta^((alpha+p-1)/p) as a positive supersolution with lambda = c_{alpha,p,1} in a ball"""
    if profile.spec.kind != DomainKind.BALL:
        raise ParameterError("mean-convexity check is defined for balls")
    if params.alpha_plus_p <= 1.0:
        raise ParameterError("mean-convexity check requires alpha + p > 1")
    nu = (params.alpha_plus_p - 1.0) / params.p
    lam = c_const(params, 1)
    radius = profile.spec.outer
    window = radius_window or (radius * 0.05, radius * (1.0 - 1e-10))
    radii = _window_samples(profile, window, Location.BOUNDARY, samples)
    fn = RadialFn.distance_power(profile, nu)
    res, holds, threshold = _scan_sign(profile, fn, params, lam, radii, nonnegative=True)
    return SignCheckReport(
        location=Location.BOUNDARY, sign=None, nu=nu, beta=None, lam=lam,
        window=(float(min(window)), float(max(window))), samples=len(radii), expected="nonnegative",
        min_residual=float(res.min()), max_residual=float(res.max()),
        holds=holds, threshold_radius=threshold,
    )


def _branch_integral(branch: Branch, integrand: Callable[[np.ndarray], np.ndarray], depth: float,
                     power: Optional[float] = None, t_min: Optional[float] = None) -> float:
    """int_0^depth integrand(delta) [delta^power] d delta on one branch

    With ``power`` the singular factor delta^power is handled by an
    algebraic-weight rule; with ``t_min`` the integral runs over
    (t_min, depth) in the variable log(delta).
    """
    rel = settings.QUAD_REL_TOL
    if t_min is not None:
        def in_log(y):
            d = math.exp(y)
            factor = d if power is None else d ** (power + 1.0)
            return float(integrand(np.asarray(d))) * factor
        value, _ = integrate.quad(in_log, math.log(t_min), math.log(depth), epsabs=0.0, epsrel=rel, limit=400)
        return value
    if power is None:
        value, _ = integrate.quad(lambda d: float(integrand(np.asarray(d))), 0.0, depth,
                                  epsabs=0.0, epsrel=rel, limit=400)
        return value
    value, _ = integrate.quad(lambda d: float(integrand(np.asarray(d))), 0.0, depth,
                              weight="alg", wvar=(power, 0.0), epsabs=0.0, epsrel=rel, limit=400)
    return value


def agmon_quotient(profile: DistanceProfile, params: Params, epsilon: float,
                   t_min: Optional[float] = None) -> AgmonQuotient:
    """Weighted energies of u = delta^(eps/p) and their ratio"""
    if profile.spec.is_exterior:
        raise ParameterError("test-function quotient needs a bounded domain")
    if epsilon <= 0.0:
        raise ParameterError("epsilon must be positive")
    p, alpha = params.p, params.alpha
    power = epsilon - alpha - p
    if power <= -1.0 and t_min is None:
        raise DivergentIntegralError(
            f"alpha+p-epsilon={alpha + p - epsilon:g} >= 1: weighted integrals of delta^(eps/p) diverge",
            {"alpha": alpha, "p": p, "epsilon": epsilon},
        )
    u = RadialFn.distance_power(profile, epsilon / p)

    numerator = denominator = 0.0
    for branch in profile.branches:
        floor = 1e-30 * branch.depth

        # Integrands divided by delta^power, evaluated in logs; smooth up to delta = 0.
        def grad_term(d, branch=branch, floor=floor):
            d = np.maximum(d, floor)
            r = branch.radius(d)
            log_terms = p * np.log(np.abs(u.derivative(r))) - (alpha + power) * np.log(d)
            return np.exp(log_terms) * profile.weight(r)

        def pot_term(d, branch=branch, floor=floor):
            d = np.maximum(d, floor)
            r = branch.radius(d)
            log_terms = p * np.log(np.abs(u(r))) - (alpha + p + power) * np.log(d)
            return np.exp(log_terms) * profile.weight(r)

        numerator += _branch_integral(branch, grad_term, branch.depth, power, t_min)
        denominator += _branch_integral(branch, pot_term, branch.depth, power, t_min)
    factor = profile.measure_factor()
    numerator *= factor
    denominator *= factor
    return AgmonQuotient(
        epsilon=epsilon, numerator=numerator, denominator=denominator,
        quotient=numerator / denominator, expected=(epsilon / p) ** p,
        truncated=t_min is not None, t_min=t_min,
    )


def integrability_probe(profile: DistanceProfile, a: Optional[float] = None,
                        weight_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                        levels: Optional[int] = None, depth_levels: Optional[int] = None) -> IntegrabilityVerdict:
    """Finiteness of int delta^-a r^(N-1) dr (or of a general f(delta)) near the boundary

    Dyadic shells toward each boundary are integrated exactly; the decay
    exponent of successive shell contributions is 1 - a for power weights and
    the integral diverges when it is not positive on the deepest shells.
    """
    if (a is None) == (weight_fn is None):
        raise ParameterError("give exactly one of a or weight_fn")
    levels = levels or settings.INTEGRABILITY_LEVELS
    depth_levels = depth_levels or settings.INTEGRABILITY_DEPTH
    f = (lambda d: d ** (-a)) if weight_fn is None else weight_fn

    if profile.spec.is_exterior:
        branches = [Branch(profile.branches[0].name, profile.branches[0].anchor, 1, profile.spec.inner)]
    else:
        branches = profile.branches

    convergent = True
    total = 0.0
    decay_tail: list = []
    for branch in branches:
        def integrand(d, branch=branch):
            return f(d) * profile.weight(branch.radius(d))

        edges = branch.depth * 2.0 ** (-np.arange(depth_levels + 1, dtype=float))
        shells = np.array([
            integrate.quad(lambda d: float(integrand(np.asarray(d))), lo, hi, epsabs=0.0,
                           epsrel=settings.QUAD_REL_TOL, limit=200)[0]
            for hi, lo in zip(edges[:-1], edges[1:])
        ])
        with np.errstate(divide="ignore", invalid="ignore"):
            kappa = np.log2(shells[:-1] / shells[1:])
        deepest = kappa[-levels:]
        decay_tail.extend(float(k) for k in deepest)
        if not np.all(np.isfinite(deepest)) or np.any(deepest <= KAPPA_TOL):
            convergent = False
            continue
        if weight_fn is None:
            total += _branch_integral(branch, lambda d: profile.weight(branch.radius(d)), branch.depth, -a)
        else:
            ratio = 2.0 ** (-deepest[-1])
            total += shells.sum() + shells[-1] * ratio / (1.0 - ratio)

    value = total * profile.measure_factor() if convergent else None
    logger.debug(f"integrability probe a={a}: convergent={convergent} value={value}")
    return IntegrabilityVerdict(convergent=convergent, value=value, exponent=a, shell_decay=decay_tail)


def chain_rule_check(profile: DistanceProfile, params: Params, nu: float, grid: Sequence[float],
                     rel_step: Optional[float] = None) -> float:
    """max |Delta(F(u)) - |F'|^(p-2)[(p-1) F'' delta^-alpha |u'|^p + F' Delta u]| for F(t)=t^nu, u=delta"""
    grid = np.asarray(grid, dtype=float)
    for kink in profile.kink_radii:
        if grid.min() <= kink <= grid.max():
            raise UndefinedPointError("grid crosses a kink of the distance function", kink)
    step = settings.FD_REL_STEP if rel_step is None else rel_step
    p, alpha = params.p, params.alpha

    composite = RadialFn.from_callable(lambda r: profile.delta(r) ** nu, profile.domain)
    distance = RadialFn.from_callable(profile.delta, profile.domain)
    lhs = -np.asarray(radial_alpha_p_laplacian(profile, composite, params, grid, step))

    delta = profile.delta(grid)
    h = step * delta
    du = (profile.delta(grid + h) - profile.delta(grid - h)) / (2.0 * h)
    lap_u = np.asarray(radial_alpha_p_laplacian(profile, distance, params, grid, step))
    f1 = nu * delta ** (nu - 1.0)
    f2 = nu * (nu - 1.0) * delta ** (nu - 2.0)
    rhs = -np.abs(f1) ** (p - 2.0) * ((p - 1.0) * f2 * delta ** (-alpha) * np.abs(du) ** p + f1 * lap_u)
    return float(np.max(np.abs(lhs - rhs)))


def asymp_distance_check(profile: DistanceProfile, r: float) -> float:
    """(grad delta . x) / delta at radius r of an exterior ball"""
    if not profile.spec.is_exterior:
        raise ParameterError("asymptotic distance check is defined for exterior domains")
    if r <= profile.spec.inner:
        raise ParameterError(f"radius {r} is not outside the ball")
    return float(profile.ddelta(r) * r / profile.delta(r))

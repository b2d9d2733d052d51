import math

import numpy as np
import pytest

from hardygap.core.exceptions import HypothesisError, ParameterError
from hardygap.models.params import IndicialProblem, Location, MonotoneDirection, Params
from hardygap.services.indicial import (
    check_cross_term,
    check_cross_term_hypotheses,
    cross_term_margin,
    indicial_function,
    indicial_root,
    lambda_boundary,
    lambda_infinity,
    root_interval,
    target_constant,
)

CONFIGS = [(0.0, 2.0, 3), (1.0, 2.0, 3), (-3.0, 2.0, 2), (0.0, 1.5, 2), (2.0, 3.0, 3), (0.5, 4.0, 5)]


def root(params, location, mu):
    return indicial_root(IndicialProblem(params=params, location=location, mu=mu))


def test_lambda_values():
    params = Params(alpha=0.0, p=2.0, dim=3)
    assert lambda_boundary(params, 0.5) == pytest.approx(0.25)
    assert lambda_boundary(params, 0.0) == 0.0
    assert lambda_infinity(params, -0.5) == pytest.approx(0.25)
    assert np.allclose(lambda_boundary(params, np.array([0.25, 1.0])), [0.1875, 0.0])


def test_root_intervals():
    params = Params(alpha=0.0, p=2.0, dim=3)
    boundary = root_interval(params, Location.BOUNDARY)
    assert (boundary.lo, boundary.hi) == (0.5, 1.0)
    assert boundary.monotone_direction == MonotoneDirection.DECREASING
    infinity = root_interval(params, Location.INFINITY)
    assert (infinity.lo, infinity.hi) == (-1.0, -0.5)
    assert infinity.monotone_direction == MonotoneDirection.INCREASING

    sub = root_interval(Params(alpha=-1.5, p=2.0, dim=3), Location.BOUNDARY)
    assert (sub.lo, sub.hi) == (-0.25, 0.0)
    sup = root_interval(Params(alpha=0.0, p=4.0, dim=3), Location.INFINITY)
    assert (sup.lo, sup.hi) == (0.0, 0.25)


@pytest.mark.parametrize("alpha, p, dim", CONFIGS)
@pytest.mark.parametrize("location", [Location.BOUNDARY, Location.INFINITY])
def test_roots_solve_the_equation(alpha, p, dim, location):
    params = Params(alpha=alpha, p=p, dim=dim)
    c = target_constant(params, location)
    f = indicial_function(params, location)
    interval = root_interval(params, location)
    for mu in np.linspace(0.0, c, 100):
        nu = root(params, location, float(mu))
        assert abs(f(nu) - mu) <= 1e-10
        assert interval.contains(nu, slack=1e-12)


@pytest.mark.parametrize("alpha, dim", [(0.0, 3), (1.0, 3), (-3.0, 2), (2.5, 4)])
def test_quadratic_closed_form(alpha, dim):
    params = Params(alpha=alpha, p=2.0, dim=dim)
    s_boundary = alpha + 1.0
    s_infinity = alpha + 2.0 - dim
    for fraction in (0.0, 0.1, 0.5, 0.9):
        mu = fraction * target_constant(params, Location.BOUNDARY)
        expected = 0.5 * s_boundary + math.sqrt(0.25 * s_boundary ** 2 - mu)
        assert root(params, Location.BOUNDARY, mu) == pytest.approx(expected, rel=1e-12, abs=1e-12)
        mu = fraction * target_constant(params, Location.INFINITY)
        expected = 0.5 * s_infinity - math.sqrt(0.25 * s_infinity ** 2 - mu)
        assert root(params, Location.INFINITY, mu) == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_extremal_targets_hit_interval_ends():
    params = Params(alpha=0.0, p=2.0, dim=3)
    assert root(params, Location.BOUNDARY, 0.25) == 0.5
    assert root(params, Location.BOUNDARY, 0.0) == 1.0
    assert root(params, Location.INFINITY, 0.25) == -0.5
    assert root(params, Location.INFINITY, 0.0) == -1.0


def test_targets_outside_range():
    params = Params(alpha=0.0, p=2.0, dim=3)
    with pytest.raises(ParameterError):
        root(params, Location.BOUNDARY, 0.3)
    with pytest.raises(ParameterError):
        root(params, Location.BOUNDARY, -1e-3)
    # Overshoot below the clamp is pulled back onto [0, c].
    assert root(params, Location.BOUNDARY, 0.25 + 1e-12) == 0.5
    assert root(params, Location.BOUNDARY, -1e-12) == 1.0


def test_degenerate_constant():
    params = Params(alpha=-1.0, p=2.0, dim=3)
    assert target_constant(params, Location.BOUNDARY) == 0.0
    assert root(params, Location.BOUNDARY, 0.0) == 0.0


@pytest.mark.parametrize("params, nu, beta, location, clause", [
    (Params(alpha=0.0, p=2.0, dim=3), 0.0, 0.7, Location.BOUNDARY, "nu!=0"),
    (Params(alpha=0.0, p=2.0, dim=3), 0.6, 0.0, Location.BOUNDARY, "beta!=0"),
    (Params(alpha=-1.0, p=2.0, dim=3), 0.1, 0.2, Location.BOUNDARY, "alpha+p!=1"),
    (Params(alpha=1.0, p=2.0, dim=3), -0.1, -0.2, Location.INFINITY, "alpha+p!=N"),
    (Params(alpha=0.0, p=2.0, dim=3), 2.0, 2.5, Location.BOUNDARY, "nu in interval"),
    (Params(alpha=0.0, p=2.0, dim=3), 0.8, 0.6, Location.BOUNDARY, "nu<beta"),
    (Params(alpha=0.0, p=2.0, dim=3), 0.6, 1.5, Location.BOUNDARY, "beta in interval"),
    (Params(alpha=0.0, p=2.0, dim=3), -0.7, -0.6, Location.INFINITY, "beta<nu"),
])
def test_hypothesis_clauses(params, nu, beta, location, clause):
    with pytest.raises(HypothesisError) as info:
        check_cross_term_hypotheses(params, nu, beta, location)
    assert info.value.clause == clause


def test_cross_term_pairs():
    params = Params(alpha=0.0, p=2.0, dim=3)
    assert cross_term_margin(params, 0.6, 0.9, Location.BOUNDARY) == pytest.approx(0.15)
    assert check_cross_term(params, 0.6, 0.9, Location.BOUNDARY)
    assert check_cross_term(params, -0.6, -1.4, Location.INFINITY)


def test_cross_term_margin_factorizes():
    # margin = (p-1) |nu|^(p-2) (nu - beta) (a - (p-1) nu - beta) with a the shifted exponent
    rng = np.random.default_rng(7)
    for _ in range(50):
        params = Params(alpha=rng.uniform(-3.0, 3.0), p=rng.uniform(1.2, 4.0), dim=int(rng.integers(2, 6)))
        p = params.p
        nu, beta = rng.uniform(0.1, 2.0, 2) * rng.choice([-1.0, 1.0], 2)
        for location, a in ((Location.BOUNDARY, params.alpha + p - 1.0),
                            (Location.INFINITY, params.alpha + p - params.dim)):
            expected = (p - 1.0) * abs(nu) ** (p - 2.0) * (nu - beta) * (a - (p - 1.0) * nu - beta)
            assert cross_term_margin(params, nu, beta, location) == pytest.approx(expected, rel=1e-9, abs=1e-10)


def test_cross_term_random_admissible_pairs():
    rng = np.random.default_rng(0)
    tested = 0
    while tested < 5000:
        params = Params(alpha=rng.uniform(-5.0, 5.0), p=rng.uniform(1.05, 5.0), dim=int(rng.integers(2, 8)))
        for location, reference in ((Location.BOUNDARY, 1.0), (Location.INFINITY, float(params.dim))):
            if abs(params.alpha_plus_p - reference) < 1e-3:
                continue
            interval = root_interval(params, location)
            nu = rng.uniform(interval.lo, interval.hi, 50)
            if location == Location.BOUNDARY:
                beta = nu + rng.uniform(0.05, 1.0, 50) * (interval.hi - nu)
            else:
                beta = nu - rng.uniform(0.05, 1.0, 50)
            keep = (nu != 0.0) & (beta != 0.0) & (np.abs(beta - nu) > 1e-6 * np.maximum(1.0, np.abs(nu)))
            margin = np.asarray(cross_term_margin(params, nu[keep], beta[keep], location))
            assert np.all(margin > 0.0)
            tested += int(keep.sum())

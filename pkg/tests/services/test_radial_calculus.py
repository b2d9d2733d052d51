import math

import numpy as np
import pytest

from hardygap.core.exceptions import DivergentIntegralError, HypothesisError, ParameterError, UndefinedPointError
from hardygap.models.params import DomainSpec, Location, Params, Sign
from hardygap.services.geometry import DistanceProfile, RadialFn
from hardygap.services.indicial import lambda_boundary
from hardygap.services.radial_calculus import (
    agmon_quotient,
    asymp_distance_check,
    chain_rule_check,
    convexity_supersolution_check,
    integrability_probe,
    radial_alpha_p_laplacian,
    residual,
    subsupersolution_sign_check,
)


@pytest.fixture
def half_line_profile(half_line):
    return DistanceProfile(half_line, 2)


class TestLaplacian:

    @pytest.mark.parametrize("alpha, p, nu", [(0.0, 2.0, 0.3), (1.0, 3.0, 0.5), (-0.5, 1.5, 0.2), (2.0, 4.0, 1.2)])
    def test_powers_solve_the_half_line_equation(self, half_line_profile, alpha, p, nu):
        params = Params(alpha=alpha, p=p)
        f = RadialFn.distance_power(half_line_profile, nu)
        lam = lambda_boundary(params, nu)
        t = np.geomspace(1e-4, 0.5, 30)
        res = residual(half_line_profile, f, params, lam, t)
        scale = abs(lam) * t ** (-(alpha + p)) * t ** (nu * (p - 1.0)) + 1.0
        assert np.all(np.abs(res) <= 1e-10 * scale)

    def test_finite_differences_agree_with_analytic(self, annulus_profile):
        params = Params(alpha=0.5, p=3.0, dim=2)
        analytic = RadialFn.distance_combination(annulus_profile, [(1.0, 0.7), (1.0, 1.3)])
        sampled = RadialFn.from_callable(analytic, annulus_profile.domain)
        r = np.array([1.05, 1.2, 1.35, 1.65, 1.8, 1.95])
        exact = radial_alpha_p_laplacian(annulus_profile, analytic, params, r)
        approx = radial_alpha_p_laplacian(annulus_profile, sampled, params, r)
        assert np.allclose(approx, exact, rtol=1e-4)

    def test_undefined_points(self, annulus_profile, laplacian_params):
        f = RadialFn.distance_power(annulus_profile, 0.5)
        with pytest.raises(UndefinedPointError):
            radial_alpha_p_laplacian(annulus_profile, f, laplacian_params, 1.5)
        with pytest.raises(UndefinedPointError):
            radial_alpha_p_laplacian(annulus_profile, f, laplacian_params, 2.5)
        flat = RadialFn.constant(1.0, annulus_profile.domain)
        with pytest.raises(UndefinedPointError):
            radial_alpha_p_laplacian(annulus_profile, flat, Params(alpha=0.0, p=1.5), 1.2)


class TestSignChecks:

    @pytest.mark.parametrize("sign", [Sign.PLUS, Sign.MINUS])
    def test_candidates_at_infinity(self, exterior_profile, sign):
        params = Params(alpha=0.0, p=2.0, dim=3)
        report = subsupersolution_sign_check(exterior_profile, params, -0.5, -1.2, Location.INFINITY, sign,
                                             radius_window=(100.0, 1000.0))
        assert report.holds
        if sign == Sign.PLUS:
            assert report.expected == "nonpositive" and report.max_residual <= 0.0
        else:
            assert report.expected == "nonnegative" and report.min_residual >= 0.0
        assert report.threshold_radius == pytest.approx(100.0)

    @pytest.mark.parametrize("sign", [Sign.PLUS, Sign.MINUS])
    def test_candidates_at_the_boundary(self, annulus_profile, laplacian_params, sign):
        report = subsupersolution_sign_check(annulus_profile, laplacian_params, 0.5, 0.9, Location.BOUNDARY, sign,
                                             radius_window=(1.0 + 1e-8, 1.0 + 1e-2))
        assert report.holds
        assert report.lam == pytest.approx(0.25)

    def test_negative_control_flips(self, exterior_profile):
        params = Params(alpha=0.0, p=2.0, dim=3)
        with pytest.raises(HypothesisError) as info:
            subsupersolution_sign_check(exterior_profile, params, -0.3, -0.6, Location.INFINITY, Sign.MINUS,
                                        radius_window=(100.0, 1000.0))
        assert info.value.clause == "nu in interval"
        report = subsupersolution_sign_check(exterior_profile, params, -0.3, -0.6, Location.INFINITY, Sign.MINUS,
                                             radius_window=(100.0, 1000.0), enforce_hypotheses=False)
        assert not report.holds
        assert not report.hypotheses_enforced

    def test_window_may_not_cross_a_kink(self, annulus_profile, laplacian_params):
        with pytest.raises(UndefinedPointError):
            subsupersolution_sign_check(annulus_profile, laplacian_params, 0.5, 0.9, Location.BOUNDARY, Sign.PLUS,
                                        radius_window=(1.2, 1.8))

    def test_window_must_stay_inside_the_domain(self, annulus_profile, exterior_profile, laplacian_params):
        with pytest.raises(ParameterError):
            subsupersolution_sign_check(annulus_profile, laplacian_params, 0.5, 0.9, Location.BOUNDARY, Sign.PLUS,
                                        radius_window=(1.0, 1.01))
        with pytest.raises(ParameterError):
            subsupersolution_sign_check(annulus_profile, laplacian_params, 0.5, 0.9, Location.BOUNDARY, Sign.PLUS,
                                        radius_window=(0.5, 1.01))
        with pytest.raises(ParameterError):
            subsupersolution_sign_check(exterior_profile, Params(alpha=0.0, p=2.0, dim=3), -0.5, -1.2,
                                        Location.INFINITY, Sign.MINUS, radius_window=(1.0, 10.0))

    def test_infinity_needs_an_exterior_domain(self, annulus_profile, laplacian_params):
        with pytest.raises(ParameterError):
            subsupersolution_sign_check(annulus_profile, laplacian_params, -0.5, -1.2, Location.INFINITY, Sign.PLUS)

    @pytest.mark.parametrize("alpha, p", [(0.0, 2.0), (1.0, 2.0), (0.0, 3.0)])
    def test_convexity_supersolution_in_a_ball(self, ball_profile, alpha, p):
        report = convexity_supersolution_check(ball_profile, Params(alpha=alpha, p=p, dim=3))
        assert report.holds
        assert report.nu == pytest.approx((alpha + p - 1.0) / p)

    def test_convexity_check_preconditions(self, annulus_profile, ball_profile):
        with pytest.raises(ParameterError):
            convexity_supersolution_check(annulus_profile, Params(alpha=0.0, p=2.0))
        with pytest.raises(ParameterError):
            convexity_supersolution_check(ball_profile, Params(alpha=-1.5, p=2.0, dim=3))


class TestAgmonQuotient:

    @pytest.mark.parametrize("spec, dim", [
        (DomainSpec.annulus(1.0, 2.0), 2),
        (DomainSpec.ball(1.0), 3),
        (DomainSpec.annulus(1.0, 3.0), 3),
    ])
    @pytest.mark.parametrize("epsilon", [0.1, 0.5, 1.0])
    def test_quotient_identity(self, spec, dim, epsilon):
        q = agmon_quotient(DistanceProfile(spec, dim), Params(alpha=-1.5, p=2.0, dim=dim), epsilon)
        assert q.expected == pytest.approx((epsilon / 2.0) ** 2)
        assert q.quotient == pytest.approx(q.expected, rel=1e-8)
        assert not q.truncated

    def test_divergent_without_truncation(self, annulus_profile, laplacian_params):
        with pytest.raises(DivergentIntegralError):
            agmon_quotient(annulus_profile, laplacian_params, 1.0)

    def test_truncated_identity(self, annulus_profile, laplacian_params):
        q = agmon_quotient(annulus_profile, laplacian_params, 1.0, t_min=1e-6)
        assert q.truncated and q.t_min == 1e-6
        assert q.quotient == pytest.approx(0.25, rel=1e-8)

    def test_preconditions(self, exterior_profile, annulus_profile, laplacian_params):
        with pytest.raises(ParameterError):
            agmon_quotient(exterior_profile, Params(alpha=-1.5, p=2.0, dim=3), 0.5)
        with pytest.raises(ParameterError):
            agmon_quotient(annulus_profile, laplacian_params, 0.0)


class TestIntegrability:

    @pytest.mark.parametrize("a", [0.0, 0.25, 0.5, 0.9, 0.99, 1.0, 1.1])
    def test_power_grid(self, annulus_profile, ball_profile, a):
        for profile in (annulus_profile, ball_profile):
            verdict = integrability_probe(profile, a=a)
            assert verdict.convergent == (a < 1.0)
            assert verdict.label == ("Convergent" if a < 1.0 else "Divergent")

    def test_convergent_value(self, annulus_profile):
        verdict = integrability_probe(annulus_profile, a=0.5)
        # Both collars of Annulus(1,2) together give 3 sqrt(2), times |S^1|.
        assert verdict.value == pytest.approx(2.0 * math.pi * 3.0 * math.sqrt(2.0), rel=1e-8)

    def test_divergent_has_no_value(self, ball_profile):
        assert integrability_probe(ball_profile, a=1.0).value is None

    def test_general_weight(self, annulus_profile):
        assert integrability_probe(annulus_profile, weight_fn=lambda d: d ** -0.5).convergent
        verdict = integrability_probe(annulus_profile, weight_fn=lambda d: d ** -1.2)
        assert not verdict.convergent and verdict.value is None

    def test_exactly_one_weight(self, annulus_profile):
        with pytest.raises(ParameterError):
            integrability_probe(annulus_profile)
        with pytest.raises(ParameterError):
            integrability_probe(annulus_profile, a=0.5, weight_fn=lambda d: d)


def test_chain_rule(annulus_profile):
    grid = np.linspace(1.1, 1.4, 25)
    for p in (2.0, 3.0):
        for nu in (0.5, 1.5, 2.0):
            assert chain_rule_check(annulus_profile, Params(alpha=0.0, p=p), nu, grid) <= 1e-4


@pytest.mark.parametrize("spec, dim, alpha, p, nu, grid", [
    (DomainSpec.exterior_ball(1.0), 3, 1.0, 3.0, 1.5, (1.5, 3.0)),
    (DomainSpec.annulus(1.0, 2.0), 2, -0.5, 1.5, 0.8, (1.1, 1.4)),
])
def test_chain_rule_weighted_cases(spec, dim, alpha, p, nu, grid):
    profile = DistanceProfile(spec, dim)
    params = Params(alpha=alpha, p=p, dim=dim)
    grid = np.linspace(*grid, 25)
    assert chain_rule_check(profile, params, nu, grid) <= 1e-4
    defects = [chain_rule_check(profile, params, nu, grid, rel_step=h) for h in (1e-2, 5e-3, 2.5e-3)]
    orders = [math.log2(a / b) for a, b in zip(defects, defects[1:])]
    assert min(orders) >= 1.9


def test_chain_rule_rejects_kinks(annulus_profile, laplacian_params):
    with pytest.raises(UndefinedPointError):
        chain_rule_check(annulus_profile, laplacian_params, 0.5, np.linspace(1.2, 1.8, 10))


def test_asymptotic_distance(exterior_profile, ball_profile):
    assert asymp_distance_check(exterior_profile, 1e4) == pytest.approx(1e4 / (1e4 - 1.0))
    with pytest.raises(ParameterError):
        asymp_distance_check(exterior_profile, 0.5)
    with pytest.raises(ParameterError):
        asymp_distance_check(ball_profile, 0.5)

import math

import numpy as np
import pytest

from hardygap.core.exceptions import ParameterError
from hardygap.models.params import DomainSpec, IntervalMode, Location
from hardygap.services.geometry import DistanceProfile, RadialFn, sphere_area


def test_sphere_area():
    assert sphere_area(2) == pytest.approx(2.0 * math.pi)
    assert sphere_area(3) == pytest.approx(4.0 * math.pi)
    assert sphere_area(4) == pytest.approx(2.0 * math.pi ** 2)


def test_annulus_distance(annulus_profile):
    r = np.array([1.1, 1.5, 1.9])
    assert np.allclose(annulus_profile.delta(r), [0.1, 0.5, 0.1])
    assert np.allclose(annulus_profile.ddelta(np.array([1.2, 1.8])), [1.0, -1.0])
    assert annulus_profile.kink_radii == [1.5]
    assert annulus_profile.is_kink(1.5)
    assert annulus_profile.branch_at(1.2).name == "inner"
    assert annulus_profile.branch_at(1.8).name == "outer"
    assert annulus_profile.domain == (1.0, 2.0)


def test_ball_and_exterior(ball_profile, exterior_profile):
    assert float(ball_profile.delta(0.25)) == pytest.approx(0.75)
    assert ball_profile.kink_radii == []
    assert float(exterior_profile.delta(5.0)) == pytest.approx(4.0)
    assert exterior_profile.domain == (1.0, math.inf)
    assert exterior_profile.singular_location() == Location.INFINITY
    assert ball_profile.singular_location() == Location.BOUNDARY


def test_interval_modes():
    half = DistanceProfile(DomainSpec.interval(2.0), 3)
    two_sided = DistanceProfile(DomainSpec.interval(2.0, IntervalMode.TWO_SIDED), 3)
    assert float(half.delta(1.5)) == pytest.approx(1.5)
    assert float(two_sided.delta(1.5)) == pytest.approx(0.5)
    assert two_sided.kink_radii == [1.0]
    # Interval measures carry no radial weight whatever the dimension.
    assert np.all(half.weight(np.array([0.5, 1.5])) == 1.0)
    assert half.measure_factor() == 1.0


def test_weights(annulus_profile, ball_profile):
    assert np.allclose(ball_profile.weight(np.array([0.5, 1.0])), [0.25, 1.0])
    assert np.allclose(annulus_profile.log_weight_derivative(np.array([1.25])), [0.8])
    assert ball_profile.measure_factor() == pytest.approx(4.0 * math.pi)


def test_power_derivatives():
    f = RadialFn.power(2.5, (0.0, 1.0), scale=2.0)
    value, first, second = f.evaluate(np.array([0.25]))
    assert value[0] == pytest.approx(2.0 * 0.25 ** 2.5)
    assert first[0] == pytest.approx(5.0 * 0.25 ** 1.5)
    assert second[0] == pytest.approx(7.5 * 0.25 ** 0.5)
    assert f.analytic


def test_distance_combination_matches_finite_differences(annulus_profile):
    f = RadialFn.distance_combination(annulus_profile, [(1.0, 0.6), (-1.0, 0.9)])
    r, h = 1.7, 1e-5
    fd_first = (f(r + h) - f(r - h)) / (2 * h)
    fd_second = (f(r + h) - 2 * f(r) + f(r - h)) / h ** 2
    assert float(f.derivative(r)) == pytest.approx(float(fd_first), rel=1e-7)
    assert float(f.second_derivative(r)) == pytest.approx(float(fd_second), rel=1e-4)


def test_sampled_profiles_have_no_analytic_derivatives():
    radii = np.linspace(1.0, 2.0, 20)
    f = RadialFn.from_samples(radii, radii ** 2)
    assert not f.analytic
    assert float(f(1.5)) == pytest.approx(2.25, rel=1e-6)
    with pytest.raises(ParameterError):
        f.derivative(1.5)

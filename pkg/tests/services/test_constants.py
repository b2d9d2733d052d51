import pytest

from hardygap.core.exceptions import ParameterError
from hardygap.models.params import Params, RegimeClass
from hardygap.services.constants import c_const, c_min, classify_regime, half_space_constant


@pytest.mark.parametrize("alpha, p, dim, c1, cn", [
    (0.0, 2.0, 3, 0.25, 0.25),
    (1.0, 3.0, 3, 1.0, 1.0 / 27.0),
    (0.0, 4.0, 3, (3.0 / 4.0) ** 4, (1.0 / 4.0) ** 4),
    (-1.0, 2.0, 2, 0.0, 0.25),
    (0.0, 1.5, 2, (0.5 / 1.5) ** 1.5, (0.5 / 1.5) ** 1.5),
])
def test_closed_forms(alpha, p, dim, c1, cn):
    params = Params(alpha=alpha, p=p, dim=dim)
    assert c_const(params, 1) == pytest.approx(c1, rel=1e-14)
    assert c_const(params, dim) == pytest.approx(cn, rel=1e-14)
    assert c_min(params) == pytest.approx(min(c1, cn), rel=1e-14)
    assert half_space_constant(params) == c_const(params, 1)


def test_vanishing_numerator_is_exact_zero():
    assert c_const(Params(alpha=-1.0, p=2.0, dim=3), 1) == 0.0
    assert c_const(Params(alpha=1.0, p=2.0, dim=3), 3) == 0.0


def test_m_must_be_one_or_dim():
    with pytest.raises(ParameterError):
        c_const(Params(alpha=0.0, p=2.0, dim=3), 2)


@pytest.mark.parametrize("alpha_plus_p, expected", [
    (0.5, RegimeClass.SUB1),
    (1.0, RegimeClass.EQ1),
    (2.0, RegimeClass.BETWEEN),
    (3.0, RegimeClass.EQN),
    (4.0, RegimeClass.SUPN),
])
def test_regimes(alpha_plus_p, expected):
    params = Params(alpha=alpha_plus_p - 2.0, p=2.0, dim=3)
    assert classify_regime(params).boundary_class == expected


def test_equality_threshold():
    near_one = Params(alpha=-1.0 + 1e-13, p=2.0, dim=3)
    assert classify_regime(near_one).boundary_class == RegimeClass.EQ1
    assert classify_regime(near_one, eq_tolerance=0.0).boundary_class == RegimeClass.BETWEEN
    assert classify_regime(Params(alpha=-1.0 + 1e-6, p=2.0, dim=3)).boundary_class == RegimeClass.BETWEEN

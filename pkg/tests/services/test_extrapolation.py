import math

import numpy as np
import pytest

from hardygap.services.extrapolation import aitken, cutoff_extrapolation, richardson


class TestRichardson:

    def test_second_order_sequence(self):
        result = richardson([2.0, 1.25, 1.0625])
        assert result.model == "richardson"
        assert result.order == pytest.approx(2.0)
        assert result.limit == pytest.approx(1.0)
        assert result.error_estimate == pytest.approx(1.25 * 0.1875 / 3.0)

    def test_two_values_assume_second_order(self):
        result = richardson([2.0, 1.25])
        assert result.order == 2.0
        assert result.limit == pytest.approx(1.0)

    def test_observed_order_is_clamped(self):
        assert richardson([1.0, 0.999, 0.998]).order == 0.5
        assert richardson([1.0, 0.5, 0.4999999]).order == 4.0

    def test_single_value(self):
        result = richardson([0.3])
        assert result.model == "single"
        assert result.limit == 0.3 and result.error_estimate == 0.0


class TestCutoffExtrapolation:

    def test_inverse_log_square_law(self):
        logs = np.arange(2.0, 7.0)
        values = 0.25 + math.pi ** 2 / logs ** 2
        result = cutoff_extrapolation(values, logs)
        assert result.model in ("inverse_log_square", "inverse_log_square_cubic")
        assert result.limit == pytest.approx(0.25, abs=1e-9)
        assert result.error_estimate < 1e-9
        assert result.raw == pytest.approx(values.tolist())

    def test_negative_limits_are_clipped(self):
        logs = np.arange(2.0, 6.0)
        values = -0.1 + 1.0 / logs ** 2
        clipped = cutoff_extrapolation(values, logs)
        assert clipped.limit == 0.0
        assert clipped.error_estimate >= 0.1 - 1e-9
        assert cutoff_extrapolation(values, logs, nonnegative=False).limit == pytest.approx(-0.1, abs=1e-9)

    def test_single_value(self):
        result = cutoff_extrapolation([0.4], [3.0])
        assert result.model == "single" and result.limit == 0.4


def test_aitken():
    assert aitken([1.5, 1.25, 1.125]) == pytest.approx(1.0)
    # Non-contracting sequences keep their last value.
    assert aitken([1.0, 2.0, 4.0]) == 4.0
    assert aitken([1.0, 1.0, 1.0]) == 1.0

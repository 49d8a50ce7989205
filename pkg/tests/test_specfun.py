import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracvp.errors import ArgumentRangeError, DomainError, PoleError, SeriesConvergenceError
from fracvp.specfun import ARG_MAX, MLParams, beta, gamma, ml_eval, ml_eval_report


class TestGamma:
    def test_known_values(self):
        assert gamma(2) == pytest.approx(1.0, rel=1e-15)
        assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)

    def test_against_mpmath(self):
        for x in np.linspace(0.1, 50.0, 97):
            expected = float(mpmath.gamma(mpmath.mpf(float(x))))
            assert gamma(float(x)) == pytest.approx(expected, rel=1e-13)

    def test_one_point_three(self):
        assert gamma(1.3) == pytest.approx(0.8974706963062772, rel=1e-13)

    @pytest.mark.parametrize('x', [0, 0.0, -1, -2.0, -7])
    def test_poles(self, x):
        with pytest.raises(PoleError):
            gamma(x)

    @given(st.floats(min_value=0.1, max_value=30.0))
    def test_recurrence(self, x):
        assert gamma(x + 1) == pytest.approx(x * gamma(x), rel=1e-12)


class TestBeta:
    @pytest.mark.parametrize('x, y, expected', [
        (1.0, 2.0, 0.5),
        (0.5, 0.5, math.pi),
        (1.5, 2.0, 4.0 / 15.0),
    ])
    def test_known_values(self, x, y, expected):
        assert beta(x, y) == pytest.approx(expected, rel=1e-13)

    @pytest.mark.parametrize('x, y', [(0.0, 1.0), (1.0, -0.5), (-1.0, -1.0)])
    def test_domain(self, x, y):
        with pytest.raises(DomainError):
            beta(x, y)


class TestMLParams:
    def test_rejects_nonpositive_order_and_shift(self):
        with pytest.raises(DomainError):
            MLParams(0.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            MLParams(1.0, -1.0, 1.0)

    def test_refuses_large_arguments(self):
        MLParams(1.0, 1.0, -ARG_MAX)
        with pytest.raises(ArgumentRangeError):
            MLParams(1.0, 1.0, -ARG_MAX - 1.0)

    def test_rejects_non_finite_argument(self):
        with pytest.raises(DomainError):
            MLParams(1.0, 1.0, math.nan)


class TestMittagLeffler:
    def test_exponential(self):
        assert ml_eval(MLParams(1.0, 1.0, 1.0)) == pytest.approx(math.e, abs=1e-12)

    def test_first_sine_zero(self):
        assert abs(ml_eval(MLParams(2.0, 2.0, -math.pi ** 2))) <= 1e-10

    def test_shifted_exponential(self):
        assert ml_eval(MLParams(1.0, 2.0, -1.0)) == pytest.approx(1.0 - math.exp(-1.0), abs=1e-12)

    def test_zero_argument(self):
        assert ml_eval(MLParams(1.7, 1.4, 0.0)) == pytest.approx(1.0 / gamma(1.4), rel=1e-15)

    def test_sinc_identity(self):
        for lam in np.linspace(0.01, 100.0, 400):
            root = math.sqrt(lam)
            assert abs(ml_eval(MLParams(2.0, 2.0, -float(lam))) - math.sin(root) / root) <= 1e-10

    def test_expm1_identity(self):
        for z in np.linspace(-30.0, 5.0, 351):
            if abs(z) < 1e-9:
                continue
            expected = math.expm1(z) / z
            assert abs(ml_eval(MLParams(1.0, 2.0, float(z))) - expected) <= 1e-10

    def test_report_states_its_bound(self):
        report = ml_eval_report(MLParams(1.5, 2.0, -10.0), abs_tol=1e-12)
        assert 0 <= report.tail_bound <= 1e-12
        assert report.terms > 10
        assert report.max_term >= abs(report.value)

    def test_cancellation_raises_working_precision(self):
        report = ml_eval_report(MLParams(1.0, 2.0, -30.0))
        assert report.precision_digits > 16
        assert report.value == pytest.approx(-math.expm1(-30.0) / 30.0, abs=1e-12)

    def test_well_conditioned_stays_in_double(self):
        assert ml_eval_report(MLParams(2.0, 2.0, -1.0)).precision_digits == 16

    def test_against_mpmath_series(self):
        order, shift, x = 1.3, 1.7, -12.5
        with mpmath.workdps(50):
            expected = mpmath.fsum(mpmath.mpf(x) ** k * mpmath.rgamma(k * order + shift) for k in range(400))
        assert ml_eval(MLParams(order, shift, x)) == pytest.approx(float(expected), abs=1e-12)

    def test_overflow_guard(self):
        with pytest.raises(SeriesConvergenceError):
            ml_eval(MLParams(0.1, 1.0, 200.0))

    def test_rejects_nonpositive_tolerance(self):
        with pytest.raises(DomainError):
            ml_eval(MLParams(1.0, 1.0, 1.0), abs_tol=0.0)

    @given(
        order=st.floats(min_value=1.0, max_value=2.0),
        shift=st.floats(min_value=1.0, max_value=2.0),
        x=st.floats(min_value=-50.0, max_value=10.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_tolerance_consistency(self, order, shift, x):
        coarse = ml_eval(MLParams(order, shift, x), abs_tol=1e-8)
        fine = ml_eval(MLParams(order, shift, x), abs_tol=1e-12)
        assert abs(coarse - fine) <= 1e-7

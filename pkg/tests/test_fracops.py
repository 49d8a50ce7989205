import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.polynomial import Polynomial

from fracvp.errors import DomainError, PoleError, StepUnderflowError
from fracvp.fracops import (
    FnKind,
    OrderPair,
    RealFn,
    Regime,
    power_rule_derivative,
    power_rule_integral,
    rl_derivative,
    rl_integral,
    rl_integral_fn,
)
from fracvp.specfun import gamma


class TestOrderPair:
    def test_second_order(self):
        orders = OrderPair.second_order(0.5)
        assert (orders.alpha, orders.beta, orders.regime) == (2.0, 0.5, Regime.SECOND_ORDER)

    @pytest.mark.parametrize('beta', [0.0, -0.1, 1.5])
    def test_second_order_rejects_beta(self, beta):
        with pytest.raises(DomainError):
            OrderPair.second_order(beta)

    @pytest.mark.parametrize('alpha, beta', [(1.0, 0.0), (2.5, 0.5), (1.8, 0.9), (1.5, 0.0), (2.0, 1.2)])
    def test_fractional_rejects(self, alpha, beta):
        with pytest.raises(DomainError):
            OrderPair.fractional(alpha, beta)

    def test_excess(self):
        assert OrderPair.fractional(1.8, 0.5).excess == pytest.approx(0.3)
        assert OrderPair.fractional(2.0, 1.0).excess == 0.0

    def test_boundary_snaps_to_zero(self):
        orders = OrderPair.fractional(1.5, 0.5 + 1e-13)
        assert orders.excess == 0.0

    def test_no_middle_term(self):
        orders = OrderPair.no_middle_term(2.0)
        assert orders.beta == 0.0
        assert orders.excess == 1.0
        with pytest.raises(DomainError):
            OrderPair(2.0, 0.5, Regime.NO_MIDDLE_TERM)


class TestRealFn:
    def test_constant(self):
        assert RealFn.const(3.5)(123.0) == 3.5

    def test_polynomial(self):
        f = RealFn.polynomial([1.0, -2.0, 0.5])
        assert f(2.0) == pytest.approx(1.0 - 4.0 + 2.0)

    def test_tabulated_interpolates(self):
        f = RealFn.tabulated([0.0, 1.0, 2.0], [0.0, 2.0, 0.0])
        assert f(0.25) == pytest.approx(0.5)
        assert f(1.5) == pytest.approx(1.0)
        assert f.kind is FnKind.TABULATED
        assert (f.lower, f.upper) == (0.0, 2.0)

    def test_tabulated_outside_grid(self):
        f = RealFn.tabulated([0.0, 1.0], [1.0, 1.0])
        with pytest.raises(DomainError):
            f(1.5)

    @pytest.mark.parametrize('grid, values', [
        ([0.0], [1.0]),
        ([0.0, 0.0, 1.0], [1.0, 2.0, 3.0]),
        ([1.0, 0.5], [1.0, 2.0]),
        ([0.0, 1.0], [1.0]),
        ([0.0, 1.0], [1.0, math.nan]),
    ])
    def test_tabulated_validation(self, grid, values):
        with pytest.raises(DomainError):
            RealFn.tabulated(grid, values)

    def test_power(self):
        f = RealFn.power(0.5, origin=1.0, scale=2.0)
        assert f(5.0) == pytest.approx(4.0)
        assert f(1.0) == 0.0
        with pytest.raises(DomainError):
            f(0.5)

    def test_power_singular_origin(self):
        f = RealFn.power(-0.5)
        with pytest.raises(DomainError):
            f(0.0)
        with pytest.raises(DomainError):
            RealFn.power(-1.0)

    def test_spans(self):
        f = RealFn.tabulated([0.0, 1.0], [0.0, 1.0])
        assert f.spans(0.0, 1.0)
        assert not f.spans(-0.1, 1.0)
        assert RealFn.const(1.0).spans(-1e9, 1e9)

    def test_power_terms_shift_polynomial(self):
        terms = RealFn.polynomial([1.0, 2.0, 3.0]).power_terms(1.0)
        assert terms == [(6.0, 0.0), (8.0, 1.0), (3.0, 2.0)]

    def test_power_terms_power_kind(self):
        assert RealFn.power(0.8, origin=0.5).power_terms(0.5) == [(1.0, 0.8)]
        assert RealFn.power(0.8, origin=0.5).power_terms(0.0) is None
        assert RealFn.from_callable(math.sin).power_terms(0.0) is None

    def test_max_abs(self):
        assert RealFn.polynomial([0.0, -1.0, 1.0]).max_abs(0.0, 1.0) == pytest.approx(0.25)
        assert RealFn.tabulated([0.0, 1.0, 2.0], [0.0, -3.0, 1.0]).max_abs(0.5, 2.0) == 3.0
        assert RealFn.power(-0.5).max_abs(0.0, 1.0) == math.inf
        assert RealFn.from_callable(math.sin).max_abs(0.0, math.pi) == pytest.approx(1.0, abs=1e-9)
        with pytest.raises(DomainError):
            RealFn.const(1.0).max_abs(1.0, 0.0)


class TestPowerRules:
    def test_integral(self):
        assert power_rule_integral(1.0, 0.5, 0.0, 1.0) == pytest.approx(1.0 / gamma(2.5))
        assert power_rule_integral(0.0, 1.0, 0.0, 2.0) == pytest.approx(2.0)

    def test_derivative_anchor(self):
        assert power_rule_derivative(0.8, 0.5, 0.0, 1.0) == pytest.approx(gamma(1.8) / gamma(1.3), rel=1e-14)

    @pytest.mark.parametrize('order, t', [(0.5, 0.3), (1.0, 2.0), (1.7, 2.3), (2.0, 5.0)])
    def test_derivative_annihilates(self, order, t):
        assert power_rule_derivative(order - 1.0, order, 0.0, t) == 0.0

    def test_ordinary_derivative(self):
        assert power_rule_derivative(1.0, 1.0, 0.0, 3.0) == pytest.approx(1.0)
        assert power_rule_derivative(3.0, 2.0, 0.0, 2.0) == pytest.approx(12.0)

    def test_pole(self):
        with pytest.raises(PoleError):
            power_rule_derivative(-1.5, 0.5, 0.0, 1.0)

    def test_singular_at_origin(self):
        with pytest.raises(DomainError):
            power_rule_derivative(0.2, 0.5, 0.0, 0.0)


class TestRlIntegral:
    def test_constant(self, quad_cfg):
        assert rl_integral(RealFn.const(1.0), 1.0, 0.0, 2.0, quad_cfg) == pytest.approx(2.0, abs=1e-12)

    def test_power(self, quad_cfg):
        value = rl_integral(RealFn.power(1.0), 0.5, 0.0, 1.0, quad_cfg)
        assert value == pytest.approx(1.0 / gamma(2.5), abs=1e-9)
        assert value == pytest.approx(0.7522528, abs=1e-7)

    def test_sine_twice(self, quad_cfg):
        f = RealFn.from_callable(math.sin, lower=0.0)
        assert rl_integral(f, 2.0, 0.0, math.pi, quad_cfg) == pytest.approx(math.pi, abs=1e-8)

    def test_order_zero_is_identity(self):
        assert rl_integral(RealFn.polynomial([1.0, 1.0]), 0.0, 0.0, 2.0) == 3.0

    def test_at_lower_limit(self):
        assert rl_integral(RealFn.const(7.0), 0.7, 1.0, 1.0) == 0.0

    def test_domain(self):
        with pytest.raises(DomainError):
            rl_integral(RealFn.const(1.0), -0.5, 0.0, 1.0)
        with pytest.raises(DomainError):
            rl_integral(RealFn.const(1.0), 0.5, 1.0, 0.0)

    @given(st.floats(0.1, 3.0), st.floats(0.0, 2.0), st.floats(0.1, 2.0))
    @settings(max_examples=30, deadline=None)
    def test_matches_power_rule(self, order, p, t):
        numeric = rl_integral(RealFn.power(p), order, 0.0, t)
        assert numeric == pytest.approx(power_rule_integral(p, order, 0.0, t), rel=1e-7, abs=1e-9)

    def test_as_function(self, quad_cfg):
        composed = rl_integral_fn(RealFn.const(1.0), 1.0, 0.0, quad_cfg)
        assert composed(0.75) == pytest.approx(0.75, abs=1e-12)
        assert composed.lower == 0.0


class TestRlDerivative:
    def test_power_examples(self, quad_cfg):
        assert rl_derivative(RealFn.power(1.0), 0.5, 0.0, 1.0, quad_cfg) == pytest.approx(1.1283792, abs=1e-7)
        assert rl_derivative(RealFn.power(0.8), 0.5, 0.0, 1.0, quad_cfg) == pytest.approx(gamma(1.8) / gamma(1.3))

    def test_constant(self, quad_cfg):
        assert rl_derivative(RealFn.const(1.0), 1.0, 0.0, 5.0, quad_cfg) == 0.0

    def test_polynomial_fractional(self, quad_cfg):
        # D^0.5 (1 + t) = t^-0.5 / Gamma(0.5) + t^0.5 / Gamma(1.5)
        expected = 4.0 ** -0.5 / gamma(0.5) + 4.0 ** 0.5 / gamma(1.5)
        value = rl_derivative(RealFn.polynomial([1.0, 1.0]), 0.5, 0.0, 4.0, quad_cfg)
        assert value == pytest.approx(expected, rel=1e-13)

    def test_numeric_path_matches_power_rule(self, quad_cfg):
        f = RealFn.from_callable(lambda s: s ** 0.8, lower=0.0)
        assert rl_derivative(f, 0.5, 0.0, 1.0, quad_cfg) == pytest.approx(gamma(1.8) / gamma(1.3), abs=1e-6)

    def test_numeric_second_order_stencil(self, quad_cfg):
        f = RealFn.from_callable(lambda s: s ** 3, lower=0.0)
        assert rl_derivative(f, 1.5, 0.0, 1.0, quad_cfg) == pytest.approx(6.0 / gamma(2.5), abs=1e-5)

    @pytest.mark.parametrize('p, order', [(0.8, 0.5), (1.5, 0.3), (2.0, 1.7), (0.4, 1.0)])
    def test_power_kind_consistency(self, quad_cfg, p, order):
        assert rl_derivative(RealFn.power(p), order, 0.0, 1.0, quad_cfg) == pytest.approx(
            power_rule_derivative(p, order, 0.0, 1.0), abs=1e-8)

    def test_order_range(self):
        with pytest.raises(DomainError):
            rl_derivative(RealFn.const(1.0), 2.5, 0.0, 1.0)
        with pytest.raises(DomainError):
            rl_derivative(RealFn.const(1.0), 0.0, 0.0, 1.0)

    def test_no_closed_form_at_lower_limit(self):
        with pytest.raises(DomainError):
            rl_derivative(RealFn.from_callable(math.sin, lower=0.0), 0.5, 0.0, 0.0)

    def test_stencil_crossing_lower_limit(self, quad_cfg):
        with pytest.raises(StepUnderflowError):
            rl_derivative(RealFn.from_callable(math.sin, lower=0.0), 0.5, 0.0, 1e-8, quad_cfg)

    def test_coarse_tabulated_grid(self, quad_cfg):
        f = RealFn.tabulated([0.0, 1.0], [0.0, 1.0])
        with pytest.raises(StepUnderflowError):
            rl_derivative(f, 0.5, 0.0, 0.5, quad_cfg)

    def test_tabulated_first_derivative(self, quad_cfg):
        grid = np.linspace(0.0, 1.0, 2001)
        f = RealFn.tabulated(grid, grid ** 2)
        assert rl_derivative(f, 1.0, 0.0, 0.5, quad_cfg) == pytest.approx(1.0, abs=1e-6)

    def test_tabulated_backward_stencil_at_grid_end(self, quad_cfg):
        grid = np.linspace(0.0, 1.0, 2001)
        f = RealFn.tabulated(grid, grid ** 2)
        assert rl_derivative(f, 1.0, 0.0, 1.0, quad_cfg) == pytest.approx(2.0, abs=1e-3)


POLYNOMIALS = [
    [1.0],
    [0.5, -1.0],
    [0.0, 2.0, -1.0],
    [0.5, -1.0, 0.25, 1.0],
]


class TestOperatorIdentities:
    """D^p I^q f = I^(q-p) f and the derivative bounds used by the estimates"""

    @pytest.mark.slow
    @pytest.mark.parametrize('coefs', POLYNOMIALS)
    @pytest.mark.parametrize('p, q', [(0.5, 0.7), (1.0, 1.5)])
    def test_semigroup_polynomials(self, quad_cfg, coefs, p, q):
        f = RealFn.polynomial(coefs)
        composed = rl_integral_fn(f, q, 0.0, quad_cfg)
        for t in np.linspace(0.1, 1.0, 10):
            lhs = rl_derivative(composed, p, 0.0, float(t), quad_cfg)
            rhs = rl_integral(f, q - p, 0.0, float(t), quad_cfg)
            assert abs(lhs - rhs) <= 1e-6, (coefs, p, q, t)

    @pytest.mark.slow
    @pytest.mark.parametrize('p, q', [(0.5, 0.7), (1.0, 1.5)])
    def test_semigroup_sine(self, quad_cfg, p, q):
        f = RealFn.from_callable(math.sin, lower=0.0)
        composed = rl_integral_fn(f, q, 0.0, quad_cfg)
        for t in np.linspace(0.1, 1.0, 10):
            lhs = rl_derivative(composed, p, 0.0, float(t), quad_cfg)
            rhs = rl_integral(f, q - p, 0.0, float(t), quad_cfg)
            assert abs(lhs - rhs) <= 1e-6, (p, q, t)

    @pytest.mark.slow
    def test_semigroup_above_first_order(self, quad_cfg):
        f = RealFn.polynomial([1.0, 1.0])
        composed = rl_integral_fn(f, 1.9, 0.0, quad_cfg)
        for t in (0.5, 0.75, 1.0):
            lhs = rl_derivative(composed, 1.3, 0.0, t, quad_cfg)
            rhs = rl_integral(f, 0.6, 0.0, t, quad_cfg)
            assert abs(lhs - rhs) <= 1e-5, t

    @given(
        st.lists(st.floats(-2.0, 2.0), min_size=1, max_size=3),
        st.floats(0.05, 1.0),
        st.floats(0.05, 1.0),
    )
    @settings(max_examples=50, deadline=None)
    def test_mean_value_bound(self, coefs, beta, t):
        x = RealFn.polynomial([0.0] + coefs)
        samples = np.linspace(0.0, t, 401)
        peak = max(abs(rl_derivative(x, beta, 0.0, float(s))) for s in samples)
        assert abs(x(t)) <= t ** beta / gamma(beta + 1.0) * peak + 1e-6

    @given(
        st.lists(st.floats(-2.0, 2.0), min_size=1, max_size=3),
        st.floats(0.05, 1.0),
        st.floats(0.0, 1.0),
    )
    @settings(max_examples=50, deadline=None)
    def test_derivative_bound_by_slope(self, coefs, beta, t):
        x = RealFn.polynomial([0.0] + coefs)
        slope = RealFn.polynomial(Polynomial([0.0] + coefs).deriv().coef).max_abs(0.0, 1.0)
        bound = slope * t ** (1.0 - beta) / gamma(2.0 - beta)
        assert abs(rl_derivative(x, beta, 0.0, t)) <= bound + 1e-6

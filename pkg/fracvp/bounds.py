"""Inequality right-hand sides and the Green's-function kernels behind them

Every calculator returns a BoundReport that splits the right-hand side into
its g and f contributions. Kernels use the convention 0^0 = 1, so at
alpha - beta - 1 = 0 the power (t-a)^(alpha-beta-1) is identically 1.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Sequence

import numpy as np
from scipy import optimize

from fracvp.errors import BracketError, DomainError
from fracvp.fracops import OrderPair, RealFn, Regime
from fracvp.quad import QuadConfig, QuadResult, integrate
from fracvp.specfun import gamma

logger = logging.getLogger(__name__)


class Branch(str, Enum):
    """Which argument of the outer maximum over g-integrals won"""

    G_FIRST_INTEGRAL = 'g_first_integral'
    G_SECOND_INTEGRAL = 'g_second_integral'


@dataclass(frozen=True)
class ProblemSpec:
    """
    Dirichlet problem on [a, b] with coefficients f, g and orders (alpha, beta)

    ``strict`` selects the strict inequality, valid for solutions of one
    sign; False gives the non-strict form that holds for any nontrivial
    solution.
    """

    a: float
    b: float
    f_coeff: RealFn
    g_coeff: RealFn
    orders: OrderPair
    strict: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError(f"interval endpoints must be finite, got [{self.a}, {self.b}]")
        if not self.a < self.b:
            raise DomainError(f"problem needs a < b, got [{self.a}, {self.b}]")
        for name, coeff in (('f', self.f_coeff), ('g', self.g_coeff)):
            if not coeff.spans(self.a, self.b):
                raise DomainError(
                    f"coefficient {name} is defined on [{coeff.lower}, {coeff.upper}], "
                    f"which does not cover [{self.a}, {self.b}]"
                )

    @property
    def length(self) -> float:
        return self.b - self.a


@dataclass(frozen=True)
class BoundReport:
    """Decomposed right-hand side of an inequality and whether it holds"""

    g_term: float
    f_term: float
    total: float
    lhs: float
    satisfied: bool
    branch_taken: Branch
    quad_error_estimate: float = 0.0
    strict: bool = True

    def to_dict(self):
        return {
            'lhs': self.lhs,
            'g_term': self.g_term,
            'f_term': self.f_term,
            'total': self.total,
            'satisfied': self.satisfied,
            'branch_taken': self.branch_taken.value,
            'quad_error_estimate': self.quad_error_estimate,
        }


def _report(lhs, g_term, f_term, branch, error, strict) -> BoundReport:
    total = g_term + f_term
    satisfied = lhs < total if strict else lhs <= total
    return BoundReport(
        g_term=g_term,
        f_term=f_term,
        total=total,
        lhs=lhs,
        satisfied=satisfied,
        branch_taken=branch,
        quad_error_estimate=error,
        strict=strict,
    )


def _weighted(weight: Callable[[float], float], coeff: RealFn, lo: float, hi: float,
              cfg: QuadConfig) -> QuadResult:
    return integrate(lambda s: weight(s) * abs(coeff(s)), lo, hi, cfg)


def _pow(x: float, e: float) -> float:
    # 0^0 = 1
    return 1.0 if e == 0 else x ** e


def phi_fun(t: float, a: float, b: float) -> float:
    """Distance from t to the nearer endpoint, min(t-a, b-t)"""
    return min(t - a, b - t)


def vp_rhs(M1: float, M2: float, a: float, b: float) -> float:
    """Classical bound M1(b-a) + M2(b-a)^2/2"""
    if not a < b:
        raise DomainError(f"vp_rhs needs a < b, got [{a}, {b}]")
    if M1 < 0 or M2 < 0:
        raise DomainError(f"vp_rhs needs M1, M2 >= 0, got ({M1}, {M2})")
    length = b - a
    return M1 * length + M2 * length * length / 2.0


def vp_report(spec: ProblemSpec) -> BoundReport:
    """
    Classical inequality 1 < M1(b-a) + M2(b-a)^2/2 with M1 = max|g|, M2 = max|f|
    """
    length = spec.length
    m1 = spec.g_coeff.max_abs(spec.a, spec.b)
    m2 = spec.f_coeff.max_abs(spec.a, spec.b)
    return _report(1.0, m1 * length, m2 * length * length / 2.0,
                   Branch.G_FIRST_INTEGRAL, 0.0, strict=True)


def _second_order_terms(spec: ProblemSpec, beta: float, cfg: QuadConfig) -> BoundReport:
    a, b = spec.a, spec.b
    scale = 1.0 / gamma(2.0 - beta)
    first = _weighted(lambda s: scale * (s - a) ** (2.0 - beta), spec.g_coeff, a, b, cfg)
    second = _weighted(lambda s: scale * _pow(s - a, 1.0 - beta) * (b - s), spec.g_coeff, a, b, cfg)
    f_part = _weighted(lambda s: (s - a) * (b - s), spec.f_coeff, a, b, cfg)

    if first.value >= second.value:
        g_term, branch = first.value, Branch.G_FIRST_INTEGRAL
    else:
        g_term, branch = second.value, Branch.G_SECOND_INTEGRAL
    error = first.error + second.error + f_part.error
    return _report(spec.length, g_term, f_part.value, branch, error, spec.strict)


def second_order_rhs(spec: ProblemSpec, cfg: QuadConfig = None) -> BoundReport:
    """
    Bound for x'' + g D^beta x + f x = 0 with Dirichlet conditions

    b - a < max{ int (s-a)^(2-beta)|g| / Gamma(2-beta),
                 int (s-a)^(1-beta)(b-s)|g| / Gamma(2-beta) }
            + int (s-a)(b-s)|f|
    """
    if spec.orders.regime is not Regime.SECOND_ORDER:
        raise DomainError(f"second_order_rhs needs the second-order regime, got {spec.orders.regime.value}")
    return _second_order_terms(spec, spec.orders.beta, cfg)


def hw_rhs(spec: ProblemSpec, cfg: QuadConfig = None) -> BoundReport:
    """beta = 1 case: b - a < max{int (s-a)|g|, int (b-s)|g|} + int (s-a)(b-s)|f|"""
    a, b = spec.a, spec.b
    left = _weighted(lambda s: s - a, spec.g_coeff, a, b, cfg)
    right = _weighted(lambda s: b - s, spec.g_coeff, a, b, cfg)
    f_part = _weighted(lambda s: (s - a) * (b - s), spec.f_coeff, a, b, cfg)

    if left.value >= right.value:
        g_term, branch = left.value, Branch.G_FIRST_INTEGRAL
    else:
        g_term, branch = right.value, Branch.G_SECOND_INTEGRAL
    return _report(spec.length, g_term, f_part.value, branch,
                   left.error + right.error + f_part.error, spec.strict)


def _second_order_weights(spec: ProblemSpec):
    if spec.orders.regime is not Regime.SECOND_ORDER:
        raise DomainError(f"S(t) needs the second-order regime, got {spec.orders.regime.value}")
    a, b, beta = spec.a, spec.b, spec.orders.beta
    scale = 1.0 / gamma(2.0 - beta)

    def left(s):
        return scale * (s - a) ** (2.0 - beta)

    def right(s):
        return scale * _pow(s - a, 1.0 - beta) * (b - s)

    return left, right


def s_fun(t: float, spec: ProblemSpec, cfg: QuadConfig = None) -> float:
    """
    S(t) = int_a^t (s-a)^(2-beta)|g| / Gamma(2-beta) + int_t^b (s-a)^(1-beta)(b-s)|g| / Gamma(2-beta)
    """
    if not spec.a <= t <= spec.b:
        raise DomainError(f"S(t) needs t in [{spec.a}, {spec.b}], got {t!r}")
    left, right = _second_order_weights(spec)
    return (_weighted(left, spec.g_coeff, spec.a, t, cfg).value
            + _weighted(right, spec.g_coeff, t, spec.b, cfg).value)


def s_profile(ts: Sequence[float], spec: ProblemSpec, cfg: QuadConfig = None) -> np.ndarray:
    """
    S evaluated on an ascending grid

    Integrates each weight once per grid cell and accumulates, instead of
    integrating from the endpoints at every point.
    """
    ts = np.asarray(ts, dtype=float)
    if ts.ndim != 1 or ts.size == 0:
        raise DomainError("s_profile needs a non-empty 1-D grid")
    if np.any(np.diff(ts) < 0):
        raise DomainError("s_profile needs an ascending grid")
    if ts[0] < spec.a or ts[-1] > spec.b:
        raise DomainError(f"s_profile grid leaves [{spec.a}, {spec.b}]")
    left, right = _second_order_weights(spec)
    g = spec.g_coeff

    edges = np.concatenate(([spec.a], ts, [spec.b]))
    left_cells = np.array([_weighted(left, g, lo, hi, cfg).value for lo, hi in zip(edges[:-2], edges[1:-1])])
    right_cells = np.array([_weighted(right, g, lo, hi, cfg).value for lo, hi in zip(edges[1:-1], edges[2:])])
    # S(ts[i]) = sum of left cells up to ts[i] + sum of right cells from ts[i] on
    return np.cumsum(left_cells) + np.cumsum(right_cells[::-1])[::-1]


def _fractional_orders(orders: OrderPair):
    if orders.regime not in (Regime.FRACTIONAL, Regime.NO_MIDDLE_TERM):
        raise DomainError(f"kernel needs 1 < alpha <= 2 with alpha - beta - 1 >= 0, got regime {orders.regime.value}")
    return orders.alpha, orders.beta, orders.excess


def kernel_f(t: float, s: float, orders: OrderPair, a: float, b: float) -> float:
    """f(t,s) = (t-a)^(alpha-beta-1)(b-s)^(alpha-1)/(b-a)^(alpha-1) - (t-s)^(alpha-beta-1)"""
    alpha, _, e = _fractional_orders(orders)
    if s > t:
        raise DomainError(f"kernel_f needs s <= t, got s={s!r}, t={t!r}")
    if not (a <= s and t <= b):
        raise DomainError(f"kernel_f needs a <= s <= t <= b on [{a}, {b}]")
    return _pow(t - a, e) * (b - s) ** (alpha - 1.0) / (b - a) ** (alpha - 1.0) - _pow(t - s, e)


def kernel_p(s: float, orders: OrderPair, a: float, b: float) -> float:
    """p(s) = (s-a)^(alpha-beta-1)(b-s)^(alpha-1)/(b-a)^(alpha-1), the diagonal f(s,s)"""
    alpha, _, e = _fractional_orders(orders)
    return _pow(s - a, e) * (b - s) ** (alpha - 1.0) / (b - a) ** (alpha - 1.0)


def kernel_r(s: float, orders: OrderPair, a: float, b: float) -> float:
    """r(s) = (b-s)^(alpha-beta-1) - (b-s)^(alpha-1)/(b-a)^beta, equal to -f(b,s)"""
    alpha, beta, e = _fractional_orders(orders)
    return _pow(b - s, e) - (b - s) ** (alpha - 1.0) / (b - a) ** beta


def delta_kernel(s: float, orders: OrderPair, a: float, b: float) -> float:
    """
    Delta(s) = max{p(s), r(s)}

    The p branch takes part only when alpha - beta - 1 > 0; on the boundary
    alpha - beta - 1 = 0 the kernel is r alone.
    """
    r = kernel_r(s, orders, a, b)
    if orders.excess > 0:
        return max(kernel_p(s, orders, a, b), r)
    return r


def crossing_point(orders: OrderPair, a: float, b: float, tol: float = 1e-12) -> float:
    """
    The single point t* in ((a+b)/2, b) where p and r coincide

    Bisects (p - r)(b-a)^beta / (b-t)^(alpha-beta-1), which has the sign of
    p - r but stays away from zero near b.

    Raises:
        BracketError: alpha - beta - 1 <= 0 or no sign change on [(a+b)/2, b]
    """
    if orders.regime is not Regime.FRACTIONAL or orders.excess <= 0:
        raise BracketError(
            f"p and r have no crossing to bracket for alpha={orders.alpha}, beta={orders.beta} "
            f"(needs the fractional regime with alpha - beta - 1 > 0)"
        )
    if not a < b:
        raise DomainError(f"crossing_point needs a < b, got [{a}, {b}]")
    e, beta = orders.excess, orders.beta
    length = b - a

    def scaled_gap(t):
        return (t - a) ** e * (b - t) ** beta / length ** e - (length ** beta - (b - t) ** beta)

    mid = 0.5 * (a + b)
    lo_val, hi_val = scaled_gap(mid), scaled_gap(b)
    if not (lo_val > 0 > hi_val):
        raise BracketError(
            f"p - r does not change sign on [{mid}, {b}] "
            f"(values {lo_val!r}, {hi_val!r}) for alpha={orders.alpha}, beta={beta}"
        )
    return float(optimize.bisect(scaled_gap, mid, b, xtol=tol, maxiter=200))


def delta_weighted(weight: Callable[[float], float], orders: OrderPair, a: float, b: float,
                   cfg: QuadConfig = None) -> List[QuadResult]:
    """
    Pieces of int_a^b Delta(s) weight(s) ds

    Split at the p/r crossing when there is one; Delta has a kink there.
    """
    _fractional_orders(orders)
    if orders.regime is Regime.FRACTIONAL and orders.excess > 0:
        split = crossing_point(orders, a, b)
        logger.debug(f"Splitting Delta integral at t*={split!r}")
        return [
            integrate(lambda s: kernel_p(s, orders, a, b) * weight(s), a, split, cfg),
            integrate(lambda s: kernel_r(s, orders, a, b) * weight(s), split, b, cfg),
        ]
    return [integrate(lambda s: delta_kernel(s, orders, a, b) * weight(s), a, b, cfg)]


def fractional_rhs(spec: ProblemSpec, cfg: QuadConfig = None) -> BoundReport:
    """
    Bound for D^alpha x + g D^beta x + f x = 0 with Dirichlet conditions

    Gamma(alpha-beta) <= max{int Delta|g|, int p|g|}
                         + max{int Delta|f|w, int p|f|w},   w(s) = (s-a)^beta / Gamma(beta+1)
    """
    alpha, beta, _ = _fractional_orders(spec.orders)
    a, b = spec.a, spec.b
    orders = spec.orders
    g, f = spec.g_coeff, spec.f_coeff
    f_scale = 1.0 / gamma(beta + 1.0)

    def p(s):
        return kernel_p(s, orders, a, b)

    def f_weight(s):
        return f_scale * _pow(s - a, beta) * abs(f(s))

    g_first = delta_weighted(lambda s: abs(g(s)), orders, a, b, cfg)
    g_second = _weighted(p, g, a, b, cfg)
    f_first = delta_weighted(f_weight, orders, a, b, cfg)
    f_second = integrate(lambda s: p(s) * f_weight(s), a, b, cfg)
    pieces = g_first + [g_second] + f_first + [f_second]

    g_first_value = math.fsum(q.value for q in g_first)
    f_first_value = math.fsum(q.value for q in f_first)
    if g_first_value >= g_second.value:
        g_term, branch = g_first_value, Branch.G_FIRST_INTEGRAL
    else:
        g_term, branch = g_second.value, Branch.G_SECOND_INTEGRAL
    f_term = max(f_first_value, f_second.value)
    error = math.fsum(q.error for q in pieces)

    return _report(gamma(alpha - beta), g_term, f_term, branch, error, strict=False)


def lyapunov_rhs(alpha: float, a: float, b: float) -> float:
    """Gamma(alpha) (4/(b-a))^(alpha-1)"""
    if not 1 < alpha <= 2:
        raise DomainError(f"lyapunov_rhs needs 1 < alpha <= 2, got {alpha!r}")
    if not a < b:
        raise DomainError(f"lyapunov_rhs needs a < b, got [{a}, {b}]")
    return gamma(alpha) * (4.0 / (b - a)) ** (alpha - 1.0)


def lyapunov_report(spec: ProblemSpec, cfg: QuadConfig = None) -> BoundReport:
    """
    Fractional Lyapunov inequality int_a^b |f| > Gamma(alpha)(4/(b-a))^(alpha-1)

    Applies only to D^alpha x + f x = 0.

    Raises:
        DomainError: g is not identically zero on [a, b]
    """
    g_max = spec.g_coeff.max_abs(spec.a, spec.b)
    if g_max != 0:
        raise DomainError(f"the Lyapunov inequality needs g identically zero, got max|g| = {g_max!r}")
    lhs = lyapunov_rhs(spec.orders.alpha, spec.a, spec.b)
    f_part = _weighted(lambda s: 1.0, spec.f_coeff, spec.a, spec.b, cfg)
    return _report(lhs, 0.0, f_part.value, Branch.G_FIRST_INTEGRAL, f_part.error, strict=True)


def reconstruct_solution(G: RealFn, a: float, b: float, t: float, cfg: QuadConfig = None) -> float:
    """
    Solution of x'' + G = 0, x(a) = x(b) = 0, from its Green representation

    (b-a) x(t) = (b-t) int_a^t (s-a) G(s) ds + (t-a) int_t^b (b-s) G(s) ds
    """
    if not a < b:
        raise DomainError(f"reconstruct_solution needs a < b, got [{a}, {b}]")
    if not a <= t <= b:
        raise DomainError(f"reconstruct_solution needs t in [{a}, {b}], got {t!r}")
    left = integrate(lambda s: (s - a) * G(s), a, t, cfg).value
    right = integrate(lambda s: (b - s) * G(s), t, b, cfg).value
    return ((b - t) * left + (t - a) * right) / (b - a)


thm0_rhs = second_order_rhs
main1_rhs = fractional_rhs

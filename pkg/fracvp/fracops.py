"""Riemann-Liouville fractional integrals and derivatives

Solutions are assumed to lie in C^1(a, b] with a continuous fractional
derivative on [a, b]; membership is documented, not verified.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as P
from scipy import special

from fracvp.errors import DomainError, PoleError, StepUnderflowError
from fracvp.quad import QuadConfig, integrate
from fracvp.specfun import gamma

logger = logging.getLogger(__name__)

# alpha - beta - 1 within this distance of zero is treated as exactly zero
EXCESS_SNAP = 1e-12
# samples used to estimate max|f| of an opaque callable
CALLABLE_MAX_SAMPLES = 2001


class Regime(str, Enum):
    """Which boundary value problem an order pair belongs to"""

    SECOND_ORDER = 'second_order'      # x'' + g D^beta x + f x = 0, alpha fixed at 2
    FRACTIONAL = 'fractional'          # D^alpha x + g D^beta x + f x = 0
    NO_MIDDLE_TERM = 'no_middle_term'  # D^alpha x + f x = 0, beta = 0


@dataclass(frozen=True)
class OrderPair:
    """Fractional orders (alpha, beta) checked against their regime"""

    alpha: float
    beta: float
    regime: Regime

    def __post_init__(self):
        a, b = self.alpha, self.beta
        if self.regime is Regime.SECOND_ORDER:
            if a != 2.0:
                raise DomainError(f"second-order regime fixes alpha=2, got {a!r}")
            if not 0 < b <= 1:
                raise DomainError(f"second-order regime needs 0 < beta <= 1, got {b!r}")
        elif self.regime is Regime.FRACTIONAL:
            if not 1 < a <= 2:
                raise DomainError(f"fractional regime needs 1 < alpha <= 2, got {a!r}")
            if not 0 < b <= 1:
                raise DomainError(f"fractional regime needs 0 < beta <= 1, got {b!r}")
            if a - b - 1 < -EXCESS_SNAP:
                raise DomainError(f"fractional regime needs alpha - beta - 1 >= 0, got {a - b - 1!r}")
        elif self.regime is Regime.NO_MIDDLE_TERM:
            if not 1 < a <= 2:
                raise DomainError(f"no-middle-term regime needs 1 < alpha <= 2, got {a!r}")
            if b != 0.0:
                raise DomainError(f"no-middle-term regime fixes beta=0, got {b!r}")
        else:
            raise DomainError(f"unknown regime {self.regime!r}")

    @classmethod
    def second_order(cls, beta: float) -> 'OrderPair':
        return cls(2.0, float(beta), Regime.SECOND_ORDER)

    @classmethod
    def fractional(cls, alpha: float, beta: float) -> 'OrderPair':
        return cls(float(alpha), float(beta), Regime.FRACTIONAL)

    @classmethod
    def no_middle_term(cls, alpha: float) -> 'OrderPair':
        return cls(float(alpha), 0.0, Regime.NO_MIDDLE_TERM)

    @property
    def excess(self) -> float:
        """alpha - beta - 1, snapped to 0 near the boundary"""
        e = self.alpha - self.beta - 1.0
        return 0.0 if abs(e) < EXCESS_SNAP else e


class FnKind(str, Enum):
    CONSTANT = 'constant'
    POLYNOMIAL = 'polynomial'
    TABULATED = 'tabulated'
    POWER = 'power'
    CALLABLE = 'callable'


@dataclass(frozen=True, eq=False)
class RealFn:
    """
    Evaluable real coefficient or solution sample on [a, b]

    Build with the classmethods rather than the constructor. Tabulated
    functions interpolate linearly, which costs O(h^2) in the grid spacing.
    """

    kind: FnKind
    constant: float = 0.0
    coefficients: Tuple[float, ...] = ()
    grid: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None
    exponent: float = 0.0
    origin: float = 0.0
    scale: float = 1.0
    func: Optional[Callable[[float], float]] = None
    lower: float = -math.inf
    upper: float = math.inf
    label: str = field(default='')

    @classmethod
    def const(cls, c: float) -> 'RealFn':
        return cls(FnKind.CONSTANT, constant=float(c), label=f"{float(c)!r}")

    @classmethod
    def polynomial(cls, coefficients: Sequence[float]) -> 'RealFn':
        """Polynomial in t with coefficients in ascending degree"""
        coefs = tuple(float(c) for c in coefficients) or (0.0,)
        return cls(FnKind.POLYNOMIAL, coefficients=coefs, label=f"poly{coefs}")

    @classmethod
    def tabulated(cls, grid: Sequence[float], values: Sequence[float]) -> 'RealFn':
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise DomainError("tabulated grid and values must be 1-D and of equal length")
        if len(grid) < 2:
            raise DomainError("tabulated function needs at least two grid points")
        if not np.all(np.isfinite(grid)) or not np.all(np.isfinite(values)):
            raise DomainError("tabulated grid and values must be finite")
        if not np.all(np.diff(grid) > 0):
            raise DomainError("tabulated grid must be strictly increasing")
        grid.setflags(write=False)
        values.setflags(write=False)
        return cls(FnKind.TABULATED, grid=grid, values=values,
                   lower=float(grid[0]), upper=float(grid[-1]),
                   label=f"tabulated[{len(grid)}]")

    @classmethod
    def power(cls, exponent: float, origin: float = 0.0, scale: float = 1.0) -> 'RealFn':
        """scale * (t - origin)^exponent with exponent > -1"""
        if not exponent > -1:
            raise DomainError(f"power exponent must exceed -1, got {exponent!r}")
        return cls(FnKind.POWER, exponent=float(exponent), origin=float(origin),
                   scale=float(scale), lower=float(origin),
                   label=f"{scale!r}*(t-{origin!r})^{exponent!r}")

    @classmethod
    def from_callable(cls, func: Callable[[float], float], label: str = 'callable',
                      lower: float = -math.inf, upper: float = math.inf) -> 'RealFn':
        return cls(FnKind.CALLABLE, func=func, lower=float(lower), upper=float(upper), label=label)

    def __call__(self, t: float) -> float:
        if self.kind is FnKind.CONSTANT:
            return self.constant
        if self.kind is FnKind.POLYNOMIAL:
            return float(P.polyval(t, self.coefficients))
        if self.kind is FnKind.TABULATED:
            slack = 1e-12 * (self.upper - self.lower)
            if t < self.lower - slack or t > self.upper + slack:
                raise DomainError(f"t={t!r} outside tabulated grid [{self.lower!r}, {self.upper!r}]")
            return float(np.interp(t, self.grid, self.values))
        if self.kind is FnKind.POWER:
            d = t - self.origin
            if d < 0:
                raise DomainError(f"power function undefined at t={t!r} < origin {self.origin!r}")
            if d == 0:
                if self.exponent > 0:
                    return 0.0
                if self.exponent == 0:
                    return self.scale
                raise DomainError(f"power function singular at its origin t={t!r}")
            return self.scale * d ** self.exponent
        return float(self.func(t))

    def spans(self, a: float, b: float) -> bool:
        """Whether [a, b] lies inside the evaluation domain"""
        return self.lower <= a and b <= self.upper

    def power_terms(self, a: float) -> Optional[List[Tuple[float, float]]]:
        """
        Expansion as sum of c * (t - a)^p when one exists exactly

        Returns:
            List of (c, p) pairs, or None for kinds without a closed form
        """
        if self.kind is FnKind.CONSTANT:
            return [(self.constant, 0.0)]
        if self.kind is FnKind.POLYNOMIAL:
            shifted = Polynomial(self.coefficients)(Polynomial([a, 1.0]))
            return [(float(c), float(k)) for k, c in enumerate(shifted.coef)]
        if self.kind is FnKind.POWER and self.origin == a:
            return [(self.scale, self.exponent)]
        return None

    def max_abs(self, a: float, b: float) -> float:
        """
        max |f| over [a, b]

        Exact for constant, polynomial, tabulated and power kinds; a dense
        sample estimate for opaque callables.
        """
        if a > b:
            raise DomainError(f"max_abs requires a <= b, got [{a}, {b}]")
        if self.kind is FnKind.CONSTANT:
            return abs(self.constant)
        if self.kind is FnKind.POLYNOMIAL:
            poly = Polynomial(self.coefficients)
            points = [a, b]
            if poly.degree() >= 2:
                roots = poly.deriv().roots()
                points += [r.real for r in roots if abs(r.imag) < 1e-12 and a <= r.real <= b]
            return float(max(abs(poly(x)) for x in points))
        if self.kind is FnKind.TABULATED:
            inside = self.values[(self.grid >= a) & (self.grid <= b)]
            ends = [abs(self(a)), abs(self(b))]
            return float(max(ends + [float(np.max(np.abs(inside)))] if inside.size else ends))
        if self.kind is FnKind.POWER:
            if self.exponent < 0 and a == self.origin:
                return math.inf
            return max(abs(self(a)), abs(self(b)))
        samples = np.linspace(a, b, CALLABLE_MAX_SAMPLES)
        return float(np.max(np.abs([self(float(s)) for s in samples])))


def power_rule_integral(p: float, order: float, a: float, t: float) -> float:
    """I^order (t-a)^p = Gamma(p+1)/Gamma(p+1+order) (t-a)^(p+order)"""
    if not p > -1:
        raise DomainError(f"power rule needs p > -1, got {p!r}")
    if order < 0:
        raise DomainError(f"integral order must be nonnegative, got {order!r}")
    if t < a:
        raise DomainError(f"power rule needs t >= a, got t={t!r}, a={a!r}")
    if t == a:
        return 0.0 if p + order > 0 else 1.0
    return gamma(p + 1) / gamma(p + 1 + order) * (t - a) ** (p + order)


def power_rule_derivative(p: float, order: float, a: float, t: float) -> float:
    """
    D^order (t-a)^p = Gamma(p+1)/Gamma(p+1-order) (t-a)^(p-order)

    When p + 1 - order is a nonpositive integer the reciprocal Gamma vanishes
    and so does the derivative, e.g. D^mu (t-a)^(mu-1) = 0.
    """
    if not p > -1:
        raise PoleError(f"power rule needs p > -1, got {p!r}")
    if t < a:
        raise DomainError(f"power rule needs t >= a, got t={t!r}, a={a!r}")
    z = p + 1.0 - order
    nearest = round(z)
    if nearest <= 0 and abs(z - nearest) < EXCESS_SNAP:
        return 0.0
    coef = gamma(p + 1.0) * float(special.rgamma(z))
    if coef == 0.0:
        return 0.0
    d = t - a
    e = p - order
    if d == 0:
        if e > 0:
            return 0.0
        if e == 0:
            return coef
        raise DomainError(f"D^{order} (t-a)^{p} is singular at t=a")
    return coef * d ** e


def rl_integral(f: RealFn, order: float, a: float, t: float, cfg: QuadConfig = None) -> float:
    """
    Riemann-Liouville fractional integral (I_a^order f)(t)

    The weak singularity (t-s)^(order-1) is folded into the variable
    w = (t-s)^order, leaving (1/Gamma(order+1)) * int_0^{(t-a)^order} f(t - w^(1/order)) dw.
    """
    if order < 0:
        raise DomainError(f"integral order must be nonnegative, got {order!r}")
    if t < a:
        raise DomainError(f"fractional integral needs t >= a, got t={t!r}, a={a!r}")
    if order == 0:
        return f(t)
    if t == a:
        return 0.0

    inv = 1.0 / order
    # t - w^(1/order) resolves s - a no finer than one ulp of t
    floor = min(a + float(np.spacing(abs(t))), t)

    def integrand(w):
        return f(max(t - w ** inv, floor))

    result = integrate(integrand, 0.0, (t - a) ** order, cfg)
    return result.value / gamma(order + 1.0)


def rl_integral_fn(f: RealFn, order: float, a: float, cfg: QuadConfig = None) -> RealFn:
    """I_a^order f as a RealFn, for composing operators"""
    return RealFn.from_callable(
        lambda s: rl_integral(f, order, a, s, cfg),
        label=f"I^{order} {f.label}",
        lower=a,
        upper=f.upper,
    )


def _fd_step(cfg: QuadConfig, a: float, t: float, n: int) -> float:
    h = max(cfg.fd_step_rel * (t - a), cfg.fd_step_min)
    if n == 2:
        # balances O(h^4) truncation against roundoff amplified by 1/h^2
        h = math.sqrt(h * (t - a))
    if h < 64 * np.finfo(float).eps * max(abs(t), 1.0):
        raise StepUnderflowError(f"finite-difference step {h!r} vanishes relative to t={t!r}")
    return h


def _difference(g: Callable[[float], float], t: float, h: float, n: int, backward: bool) -> float:
    if n == 1:
        if backward:
            return (3.0 * g(t) - 4.0 * g(t - h) + g(t - 2 * h)) / (2.0 * h)
        return (g(t + h) - g(t - h)) / (2.0 * h)
    if backward:
        return (2.0 * g(t) - 5.0 * g(t - h) + 4.0 * g(t - 2 * h) - g(t - 3 * h)) / (h * h)
    return (-g(t + 2 * h) + 16.0 * g(t + h) - 30.0 * g(t) + 16.0 * g(t - h) - g(t - 2 * h)) / (12.0 * h * h)


def rl_derivative(f: RealFn, order: float, a: float, t: float, cfg: QuadConfig = None) -> float:
    """
    Riemann-Liouville fractional derivative (D_a^order f)(t), 0 < order <= 2

    Constant, polynomial and power kinds use the power rule term by term.
    Other kinds differentiate I^(n-order) f numerically with an n-th order
    finite-difference stencil, n = ceil(order); the stencil switches to a
    one-sided form when it would leave the function's domain.

    Raises:
        StepUnderflowError: the stencil does not fit in (a, t] or a tabulated
            grid is too coarse to resolve it
    """
    cfg = cfg or QuadConfig()
    if not 0 < order <= 2:
        raise DomainError(f"derivative order must lie in (0, 2], got {order!r}")
    if t < a:
        raise DomainError(f"fractional derivative needs t >= a, got t={t!r}, a={a!r}")

    terms = f.power_terms(a)
    if terms is not None:
        return math.fsum(c * power_rule_derivative(p, order, a, t) for c, p in terms if c != 0.0)

    if t == a:
        raise DomainError(f"no closed form for D^{order} {f.label} at t=a")

    n = math.ceil(order)
    inner = n - order
    h = _fd_step(cfg, a, t, n)
    reach = 2 * h if n == 2 else h
    backward = t + reach > f.upper
    if t - (3 * h if backward and n == 2 else 2 * h) <= a:
        raise StepUnderflowError(f"finite-difference stencil at t={t!r} crosses a={a!r}")
    if f.kind is FnKind.TABULATED:
        nodes = int(np.count_nonzero((f.grid >= a) & (f.grid <= t)))
        if nodes < 3:
            raise StepUnderflowError(
                f"tabulated grid too coarse: {nodes} nodes in [{a!r}, {t!r}]"
            )

    if inner == 0:
        g = f
    else:
        def g(s):
            return rl_integral(f, inner, a, s, cfg)

    return _difference(g, t, h, n, backward)

"""Special functions: Gamma, Beta and the two-parameter Mittag-Leffler function

The Mittag-Leffler function is evaluated by its power series only,

    E_{order,shift}(x) = sum_k x^k / Gamma(k*order + shift),

with a stated truncation bound. Terms are summed in double precision with
compensated summation while the rounding error (about eps * sum|terms|)
stays below the requested tolerance; past that point the same truncated
series is re-summed with mpmath at a working precision raised by the number
of digits lost to cancellation.
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from scipy import special

from fracvp.errors import ArgumentRangeError, DomainError, PoleError, SeriesConvergenceError

logger = logging.getLogger(__name__)

ARG_MAX = 200.0
OVERFLOW_GUARD = 1e290
DEFAULT_ML_TOL = 1e-12

_LOG_OVERFLOW_GUARD = math.log(OVERFLOW_GUARD)
_MAX_TERMS = 20000
_CHUNK = 64
_EPS = np.finfo(float).eps
# mp working precision is rounded up to a multiple of this many digits
_DPS_BUCKET = 8


def gamma(x: float) -> float:
    """
    Gamma function

    Raises:
        PoleError: x is zero or a negative integer
    """
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise PoleError(f"gamma has a pole at x={x!r}")
    return float(special.gamma(x))


def beta(x: float, y: float) -> float:
    """Beta function Gamma(x)Gamma(y)/Gamma(x+y) for x, y > 0"""
    if not (x > 0 and y > 0):
        raise DomainError(f"beta requires positive arguments, got ({x!r}, {y!r})")
    return float(special.beta(x, y))


@dataclass(frozen=True)
class MLParams:
    """Arguments of E_{order,shift}(argument)"""

    order: float
    shift: float
    argument: float

    def __post_init__(self):
        if not (self.order > 0):
            raise DomainError(f"Mittag-Leffler order must be positive, got {self.order!r}")
        if not (self.shift > 0):
            raise DomainError(f"Mittag-Leffler shift must be positive, got {self.shift!r}")
        if not math.isfinite(self.argument):
            raise DomainError(f"Mittag-Leffler argument must be finite, got {self.argument!r}")
        if abs(self.argument) > ARG_MAX:
            raise ArgumentRangeError(
                f"|argument|={abs(self.argument)!r} exceeds ARG_MAX={ARG_MAX}; "
                f"the series evaluator refuses it"
            )


@dataclass(frozen=True)
class MLResult:
    """Value of a series evaluation plus what it took to get there"""

    value: float
    tail_bound: float
    terms: int
    max_term: float
    precision_digits: int

    def to_dict(self):
        return {
            'value': self.value,
            'tail_bound': self.tail_bound,
            'terms': self.terms,
            'max_term': self.max_term,
            'precision_digits': self.precision_digits,
        }


class _SeriesCoefficients:
    """Lazily extended 1/Gamma(k*order + shift) for one (order, shift)"""

    def __init__(self, order: float, shift: float):
        self.order = order
        self.shift = shift
        self._log_coef = np.empty(0)
        self._recip = np.empty(0)
        self._mp = {}

    def _extend(self, n: int):
        have = len(self._log_coef)
        if n <= have:
            return
        size = max(n, 2 * have, _CHUNK)
        k = np.arange(size, dtype=float)
        args = k * self.order + self.shift
        self._log_coef = -special.gammaln(args)
        self._recip = special.rgamma(args)

    def log_coefficients(self, n: int) -> np.ndarray:
        self._extend(n)
        return self._log_coef[:n]

    def reciprocals(self, n: int) -> np.ndarray:
        self._extend(n)
        return self._recip[:n]

    def mp_descending(self, n: int, dps: int) -> list:
        """Coefficients of degrees n-1 .. 0 at ``dps`` digits (Horner order)"""
        cached = self._mp.get(dps, [])
        if len(cached) < n:
            with mpmath.workdps(dps):
                order = mpmath.mpf(self.order)
                shift = mpmath.mpf(self.shift)
                cached = cached + [
                    mpmath.rgamma(k * order + shift) for k in range(len(cached), max(n, 2 * len(cached)))
                ]
            self._mp[dps] = cached
        return cached[:n][::-1]


@lru_cache(maxsize=256)
def _coefficients(order: float, shift: float) -> _SeriesCoefficients:
    return _SeriesCoefficients(order, shift)


def _truncation(x: float, coefs: _SeriesCoefficients, abs_tol: float):
    """
    Decide how many terms to keep

    Returns:
        (n_terms, tail_bound, log_magnitudes of the kept terms)
    """
    log_x = math.log(abs(x))
    alternating = x < 0
    n = _CHUNK
    while True:
        k = np.arange(n, dtype=float)
        lt = k * log_x + coefs.log_coefficients(n)
        decreasing = np.flatnonzero(lt[1:] < lt[:-1])
        if decreasing.size:
            k0 = int(decreasing[0]) + 1
            if np.any(lt[:k0] > _LOG_OVERFLOW_GUARD):
                break
            tail = lt[k0:]
            if alternating:
                # once terms shrink monotonically, the first omitted term bounds the error
                bound_log = tail
            else:
                ratio = np.exp(lt[k0:] - lt[k0 - 1:-1])
                bound_log = tail - np.log1p(-ratio)
            below = np.flatnonzero(bound_log < math.log(abs_tol))
            if below.size:
                stop = k0 + int(below[0])
                return stop, float(np.exp(bound_log[below[0]])), lt[:stop]
        elif np.any(lt > _LOG_OVERFLOW_GUARD):
            break
        if n >= _MAX_TERMS:
            raise SeriesConvergenceError(
                f"series did not reach abs_tol={abs_tol} within {_MAX_TERMS} terms"
            )
        n = min(2 * n, _MAX_TERMS)

    raise SeriesConvergenceError(
        f"term magnitude exceeded OVERFLOW_GUARD={OVERFLOW_GUARD:g} before decay "
        f"(order={coefs.order!r}, shift={coefs.shift!r}, x={x!r})"
    )


def _double_terms(x: float, n: int, coefs: _SeriesCoefficients, log_terms: np.ndarray) -> np.ndarray:
    k = np.arange(n, dtype=float)
    recip = coefs.reciprocals(n)
    with np.errstate(over='ignore', invalid='ignore'):
        direct = np.power(x, k) * recip
    sign = np.where((x < 0) & (k % 2 == 1), -1.0, 1.0)
    fallback = sign * np.exp(log_terms)
    # 1/Gamma underflows long before the log form does
    usable = np.isfinite(direct) & (np.abs(recip) > 1e-290)
    return np.where(usable, direct, fallback)


def ml_eval_report(p: MLParams, abs_tol: float = DEFAULT_ML_TOL) -> MLResult:
    """
    Evaluate E_{order,shift}(argument) and report the truncation bound

    Args:
        p: Validated parameters
        abs_tol: Target for the truncation bound and for the rounding error

    Returns:
        MLResult
    """
    if not abs_tol > 0:
        raise DomainError(f"abs_tol must be positive, got {abs_tol!r}")
    coefs = _coefficients(float(p.order), float(p.shift))
    x = float(p.argument)
    if x == 0.0:
        return MLResult(float(special.rgamma(p.shift)), 0.0, 1, abs(float(special.rgamma(p.shift))), 16)

    n, tail_bound, log_terms = _truncation(x, coefs, abs_tol)
    terms = _double_terms(x, n, coefs, log_terms)
    magnitude = math.fsum(np.abs(terms))
    max_term = float(np.max(np.abs(terms)))
    rounding = 4.0 * _EPS * magnitude

    if rounding <= 0.5 * abs_tol:
        value = math.fsum(terms)
        digits = 16
    else:
        lost = math.log10(magnitude) if magnitude > 1 else 0.0
        digits = _DPS_BUCKET * math.ceil((20 + math.ceil(lost)) / _DPS_BUCKET)
        logger.debug(
            f"E_{{{p.order},{p.shift}}}({x}) loses {lost:.1f} digits in double; "
            f"summing at {digits} digits"
        )
        with mpmath.workdps(digits):
            value = float(mpmath.polyval(coefs.mp_descending(n, digits), mpmath.mpf(x)))

    return MLResult(value, tail_bound, n, max_term, digits)


def ml_eval(p: MLParams, abs_tol: float = DEFAULT_ML_TOL) -> float:
    """Mittag-Leffler function E_{order,shift}(argument) by its power series"""
    return ml_eval_report(p, abs_tol).value

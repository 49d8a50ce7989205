"""Zero-free radii of Mittag-Leffler functions and a first-zero scanner"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import optimize, special

from fracvp.bounds import delta_weighted
from fracvp.errors import DomainError
from fracvp.fracops import OrderPair, Regime
from fracvp.quad import QuadConfig
from fracvp.specfun import ARG_MAX, DEFAULT_ML_TOL, MLParams, beta, gamma, ml_eval

logger = logging.getLogger(__name__)

SCAN_POINTS = 10_000
SCAN_GEOMETRIC_LEVELS = 10
ALPHA_BAR_TOL = 1e-12


@dataclass(frozen=True)
class ZeroScanResult:
    """
    First sign change of lambda -> E(-lambda) on (0, scanned_up_to]

    first_zero is None when the scan found no sign change. Zeros of even
    multiplicity do not change sign and are not reported.
    """

    first_zero: Optional[float]
    scanned_up_to: float
    refine_tol: float
    evaluations: int
    residual: Optional[float] = None

    @property
    def found(self) -> bool:
        return self.first_zero is not None

    def to_dict(self):
        return {
            'first_zero': self.first_zero,
            'scanned_up_to': self.scanned_up_to,
            'refine_tol': self.refine_tol,
            'evaluations': self.evaluations,
        }


def _check_unit_interval(x: float, name: str):
    if not 1 < x <= 2:
        raise DomainError(f"{name} must lie in (1, 2], got {x!r}")


def vallee_f(x: float) -> float:
    """
    x^x / (x-1)^(x-1) on (1, 2]

    x = 1 is accepted and returns the limit 1.
    """
    if not 1 <= x <= 2:
        raise DomainError(f"vallee_f is defined on (1, 2], got {x!r}")
    return math.exp(special.xlogy(x, x) - special.xlogy(x - 1.0, x - 1.0))


def vallee_f_prime(x: float) -> float:
    """f'(x) = f(x) (ln x - ln(x-1)), positive on (1, 2]"""
    _check_unit_interval(x, 'x')
    return vallee_f(x) * (math.log(x) - math.log(x - 1.0))


def concavity_indicator(x: float) -> float:
    """
    x (ln x - ln(x-1))^2 - 1/(x-1)

    Has the sign of f''(x); negative throughout (1, 2].
    """
    _check_unit_interval(x, 'x')
    log_ratio = math.log(x) - math.log(x - 1.0)
    return x * log_ratio * log_ratio - 1.0 / (x - 1.0)


@lru_cache(maxsize=32)
def alpha_bar(tol: float = 1e-12) -> float:
    """
    Unique root in (1, 2) of x^x/(x-1)^(x-1) = x + 1

    The difference is -1 at x = 1 and +1 at x = 2, so [1, 2] always brackets it.
    """
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    # bisect stops once the bracket is below xtol; a quarter of tol leaves the root well within tol
    root = optimize.bisect(lambda x: vallee_f(x) - (x + 1.0), 1.0, 2.0, xtol=tol / 4.0, maxiter=200)
    logger.debug(f"alpha_bar(tol={tol}) = {root!r}")
    return float(root)


def radius_classical(alpha: float) -> float:
    """Gamma(alpha) alpha^alpha / (alpha-1)^(alpha-1): E_{alpha,2}(x) has no zeros on [-radius, 0)"""
    _check_unit_interval(alpha, 'alpha')
    return gamma(alpha) * vallee_f(alpha)


radius_thm69 = radius_classical


def radius_improved(alpha: float) -> Optional[float]:
    """Gamma(alpha)(1 + alpha) when alpha < alpha_bar, otherwise None"""
    _check_unit_interval(alpha, 'alpha')
    if alpha < alpha_bar(ALPHA_BAR_TOL):
        return gamma(alpha) * (1.0 + alpha)
    return None


def best_radius(alpha: float) -> float:
    """Larger of the classical and, when it applies, the improved radius"""
    classical = radius_classical(alpha)
    improved = radius_improved(alpha)
    return classical if improved is None else max(classical, improved)


def nu_general(orders: OrderPair, cfg: QuadConfig = None) -> float:
    """
    Zero-free radius of E_{alpha-beta,alpha}:

        Gamma(alpha-beta) / max{int_0^1 Delta(s) ds, B(alpha-beta, alpha)}
    """
    if orders.regime not in (Regime.FRACTIONAL, Regime.NO_MIDDLE_TERM):
        raise DomainError(f"nu_general needs 1 < alpha <= 2 and alpha - beta - 1 >= 0, got regime {orders.regime.value}")
    shifted = orders.alpha - orders.beta
    delta_mass = math.fsum(q.value for q in delta_weighted(lambda s: 1.0, orders, 0.0, 1.0, cfg))
    return gamma(shifted) / max(delta_mass, beta(shifted, orders.alpha))


def scan_grid(lambda_max: float) -> np.ndarray:
    """
    Ascending lambda grid: h0 * 2^-k for k = 10..1, then k * h0 for k = 1..10^4,
    with h0 = lambda_max / 10^4
    """
    h0 = lambda_max / SCAN_POINTS
    geometric = h0 * np.exp2(-np.arange(SCAN_GEOMETRIC_LEVELS, 0, -1, dtype=float))
    uniform = h0 * np.arange(1, SCAN_POINTS + 1, dtype=float)
    return np.concatenate((geometric, uniform))


def ml_first_zero(order: float, shift: float, lambda_max: float, refine_tol: float,
                  abs_tol: float = DEFAULT_ML_TOL) -> ZeroScanResult:
    """
    Smallest lambda > 0 where E_{order,shift}(-lambda) changes sign

    Grid points are evaluated in ascending order and the scan stops at the
    first sign change, which is then refined by bisection to refine_tol.

    Args:
        order: First parameter, in [1, 2]
        shift: Second parameter, in [1, 2]
        lambda_max: Scan limit, at most ARG_MAX
        refine_tol: Bisection tolerance on lambda
        abs_tol: Series tolerance for each evaluation

    Returns:
        ZeroScanResult
    """
    if not 1 <= order <= 2:
        raise DomainError(f"scanner order must lie in [1, 2], got {order!r}")
    if not 1 <= shift <= 2:
        raise DomainError(f"scanner shift must lie in [1, 2], got {shift!r}")
    if not 0 < lambda_max <= ARG_MAX:
        raise DomainError(f"lambda_max must lie in (0, {ARG_MAX}], got {lambda_max!r}")
    if not refine_tol > 0:
        raise DomainError(f"refine_tol must be positive, got {refine_tol!r}")

    evaluations = 0

    def value(lam):
        nonlocal evaluations
        evaluations += 1
        return ml_eval(MLParams(order, shift, -lam), abs_tol)

    prev_lam, prev_val = 0.0, value(0.0)
    for lam in scan_grid(lambda_max):
        lam = float(lam)
        val = value(lam)
        if val == 0.0:
            zero = lam
            break
        if math.copysign(1.0, val) != math.copysign(1.0, prev_val):
            zero = float(optimize.bisect(value, prev_lam, lam, xtol=refine_tol, maxiter=200))
            break
        prev_lam, prev_val = lam, val
    else:
        logger.info(f"E_{{{order},{shift}}}(-lambda) keeps its sign on (0, {lambda_max}] "
                    f"({evaluations} evaluations)")
        return ZeroScanResult(None, lambda_max, refine_tol, evaluations)

    residual = abs(ml_eval(MLParams(order, shift, -zero), abs_tol))
    logger.info(f"E_{{{order},{shift}}}(-lambda) first zero at {zero!r} "
                f"(residual {residual:.2e}, {evaluations} evaluations)")
    return ZeroScanResult(zero, lambda_max, refine_tol, evaluations, residual)

"""Full invariant suite behind ``fracvp verify``"""
import logging
import math
from typing import Callable, Dict, List, Tuple

import numpy as np

from fracvp import bounds, zeros
from fracvp.config_manager import ConfigManager
from fracvp.errors import FracVPError
from fracvp.fracops import OrderPair, RealFn, power_rule_derivative, rl_derivative, rl_integral
from fracvp.specfun import gamma
from fracvp.sweep_manager import SweepManager

logger = logging.getLogger(__name__)

SEED = 20240917
RANDOM_SPECS = 100
KERNEL_SAMPLES = 20

CLASSICAL_ALPHAS = [round(1.0 + 0.1 * k, 12) for k in range(1, 11)]
IMPROVED_ALPHAS = [round(1.0 + 0.05 * k, 12) for k in range(1, 9)] + [1.44]
FRACTIONAL_ALPHAS = [1.6, 1.7, 1.8, 1.9, 2.0]
FRACTIONAL_BETA_FRACTIONS = [0.2, 0.4, 0.6, 0.8, 1.0]

CheckResult = Tuple[bool, str]


class Verifier:
    """Runs each check and collects pass/fail records"""

    def __init__(self, config_manager: ConfigManager):
        self.config = config_manager
        self.cfg = config_manager.quad_config()
        self.sweeps = SweepManager(config_manager)
        self.lambda_max = config_manager.get('scan', 'lambda_max')
        self.refine_tol = config_manager.get('scan', 'refine_tol')

    def checks(self) -> List[Tuple[str, Callable[[], CheckResult]]]:
        return [
            ('alpha_bar', self.check_alpha_bar),
            ('ml_anchor_pi_squared', self.check_ml_anchor),
            ('classical_radius_sweep', self.check_classical_sweep),
            ('improved_radius_sweep', self.check_improved_sweep),
            ('fractional_radius_sweep', self.check_fractional_sweep),
            ('fractional_lyapunov', self.check_lyapunov),
            ('classical_consistency', self.check_classical_consistency),
            ('vp_recovery', self.check_vp_recovery),
            ('operator_identities', self.check_operator_identities),
            ('kernel_properties', self.check_kernel_properties),
        ]

    def run(self) -> Dict:
        records = []
        for name, check in self.checks():
            try:
                passed, detail = check()
            except FracVPError as e:
                passed, detail = False, f"{e.kind}: {e}"
            logger.info(f"Check {name}: {'pass' if passed else 'FAIL'} ({detail})")
            records.append({'name': name, 'passed': passed, 'detail': detail})
        passed = sum(1 for r in records if r['passed'])
        return {'passed': passed, 'failed': len(records) - passed, 'checks': records}

    def check_alpha_bar(self) -> CheckResult:
        value = zeros.alpha_bar(1e-6)
        return abs(value - 1.447) <= 5e-4, f"alpha_bar={value:.9f}"

    def check_ml_anchor(self) -> CheckResult:
        scan = zeros.ml_first_zero(2.0, 2.0, 50.0, 1e-9)
        if scan.first_zero is None:
            return False, "no zero found below 50"
        gap = abs(scan.first_zero - math.pi ** 2)
        return gap <= 1e-8, f"first_zero={scan.first_zero!r}, |error|={gap:.2e}"

    def _sweep(self, alphas, betas=None) -> List[Dict]:
        result = self.sweeps.run(alphas, betas, self.lambda_max, self.refine_tol)
        if not result['success']:
            raise FracVPError(result['error'])
        return result['rows']

    def check_classical_sweep(self) -> CheckResult:
        rows = self._sweep(CLASSICAL_ALPHAS)
        bad = [row['alpha'] for row in rows
               if row['first_zero'] is not None and row['first_zero'] < row['radius_thm69'] - 1e-6]
        found = sum(1 for row in rows if row['first_zero'] is not None)
        return not bad, f"{len(rows)} orders, {found} zeros found, violations at {bad}"

    def check_improved_sweep(self) -> CheckResult:
        rows = self._sweep(IMPROVED_ALPHAS)
        bad = []
        for row in rows:
            improved = gamma(row['alpha']) * (1.0 + row['alpha'])
            if row['first_zero'] is not None and row['first_zero'] < improved - 1e-6:
                bad.append(row['alpha'])
            if not improved > row['radius_thm69']:
                bad.append(row['alpha'])
        return not bad, f"{len(rows)} orders, violations at {sorted(set(bad))}"

    def check_fractional_sweep(self) -> CheckResult:
        rows = []
        for alpha in FRACTIONAL_ALPHAS:
            betas = [round((alpha - 1.0) * frac, 12) for frac in FRACTIONAL_BETA_FRACTIONS]
            rows.extend(self._sweep([alpha], betas))
        bad = [(row['alpha'], row['beta']) for row in rows if row['violation']]
        nu_21 = zeros.nu_general(OrderPair.fractional(2.0, 1.0), self.cfg)
        expected = len(FRACTIONAL_ALPHAS) * len(FRACTIONAL_BETA_FRACTIONS)
        ok = not bad and len(rows) == expected and abs(nu_21 - 2.0) <= 1e-9
        return ok, f"{len(rows)} pairs, nu(2,1)={nu_21!r}, violations at {bad}"

    def check_lyapunov(self) -> CheckResult:
        bad = []
        for alpha in CLASSICAL_ALPHAS:
            scan = zeros.ml_first_zero(alpha, alpha, self.lambda_max, self.refine_tol)
            if scan.first_zero is not None and not scan.first_zero > bounds.lyapunov_rhs(alpha, 0.0, 1.0):
                bad.append(alpha)
        return not bad, f"{len(CLASSICAL_ALPHAS)} orders, violations at {bad}"

    def check_classical_consistency(self) -> CheckResult:
        eigen = bounds.vp_rhs(0.0, math.pi ** 2, 0.0, 1.0)
        rng = np.random.default_rng(SEED)
        worst = 0.0
        for _ in range(RANDOM_SPECS):
            spec = _random_spec(rng, OrderPair.second_order(1.0))
            gap = abs(bounds.second_order_rhs(spec, self.cfg).total - bounds.hw_rhs(spec, self.cfg).total)
            worst = max(worst, gap)
        return eigen > 1.0 and worst <= 1e-10, f"vp_rhs(pi^2)={eigen!r}, max |second-order - hw|={worst:.2e}"

    def check_vp_recovery(self) -> CheckResult:
        rng = np.random.default_rng(SEED + 1)
        worst = -math.inf
        for _ in range(RANDOM_SPECS):
            m1, m2 = rng.uniform(0.0, 5.0, size=2)
            a = rng.uniform(-2.0, 2.0)
            b = a + rng.uniform(0.1, 3.0)
            spec = bounds.ProblemSpec(a, b, RealFn.const(m2), RealFn.const(m1), OrderPair.fractional(2.0, 1.0))
            excess = bounds.fractional_rhs(spec, self.cfg).total - bounds.vp_rhs(m1, m2, a, b)
            worst = max(worst, excess)
        return worst <= 1e-10, f"max(fractional total - vp_rhs)={worst:.3e}"

    def check_operator_identities(self) -> CheckResult:
        worst_semigroup = 0.0
        f = RealFn.polynomial([0.5, -1.0, 0.25, 1.0])
        for p, q in [(0.3, 0.8), (0.5, 1.5), (1.0, 1.6)]:
            composed = RealFn.from_callable(lambda s, q=q: rl_integral(f, q, 0.0, s, self.cfg), lower=0.0)
            for t in (0.4, 1.0):
                lhs = rl_derivative(composed, p, 0.0, t, self.cfg)
                rhs = rl_integral(f, q - p, 0.0, t, self.cfg)
                worst_semigroup = max(worst_semigroup, abs(lhs - rhs))

        worst_power = 0.0
        for p, order in [(0.8, 0.5), (1.5, 0.3), (2.0, 1.7)]:
            exact = power_rule_derivative(p, order, 0.0, 1.0)
            closed = rl_derivative(RealFn.power(p), order, 0.0, 1.0, self.cfg)
            worst_power = max(worst_power, abs(closed - exact))
        ok = worst_semigroup <= 1e-6 and worst_power <= 1e-8
        return ok, f"semigroup max error {worst_semigroup:.2e}, power rule max error {worst_power:.2e}"

    def check_kernel_properties(self) -> CheckResult:
        rng = np.random.default_rng(SEED + 2)
        failures = []
        for i in range(KERNEL_SAMPLES):
            alpha = rng.uniform(1.2, 2.0)
            beta = rng.uniform(0.05, 0.95) * (alpha - 1.0)
            orders = OrderPair.fractional(alpha, beta)
            a = rng.uniform(-1.0, 1.0)
            b = a + rng.uniform(0.5, 3.0)

            if not kernel_majorized(orders, a, b, 50):
                failures.append(f"majorization#{i}")
            offsets = crossing_offsets(orders, a, b, 10_000)
            if len(offsets) != 1 or not 0.0 < offsets[0] < 0.5 * (b - a):
                failures.append(f"crossing#{i}")
            spec = _random_spec(rng, OrderPair.second_order(beta))
            profile = bounds.s_profile(np.linspace(spec.a, spec.b, 1000), spec, self.cfg)
            if profile.max() > max(profile[0], profile[-1]) + 1e-8:
                failures.append(f"s_endpoint#{i}")
        return not failures, f"{KERNEL_SAMPLES} samples, failures {failures}"


def kernel_majorized(orders: OrderPair, a: float, b: float, n: int) -> bool:
    """|f(t,s)| <= Delta(s) on an n x n grid of a <= s <= t <= b"""
    grid = np.linspace(a, b, n)
    for s in grid:
        bound = bounds.delta_kernel(float(s), orders, a, b) + 1e-12
        for t in grid[grid >= s]:
            if abs(bounds.kernel_f(float(t), float(s), orders, a, b)) > bound:
                return False
    return True


def crossing_offsets(orders: OrderPair, a: float, b: float, n: int) -> List[float]:
    """
    Distances u = b - t at which p - r changes sign, largest first

    Scans in u rather than t: for small beta the crossing sits at roughly
    (b-a) 2^(-1/beta) from b, far below the spacing of doubles near b. The
    grid is n uniform points on (0, b-a) plus n geometric points from
    1e-300 (b-a) up to the uniform spacing.
    """
    alpha, e = orders.alpha, orders.excess
    length = b - a
    uniform = np.linspace(0.0, length, n + 2)[1:-1]
    graded = length * np.geomspace(1e-300, 1.0 / (n + 1), n)
    us = np.unique(np.concatenate((graded, uniform)))[::-1]
    p = (length - us) ** e * us ** (alpha - 1.0) / length ** (alpha - 1.0)
    r = us ** e - us ** (alpha - 1.0) / length ** orders.beta
    positive = p - r > 0
    idx = np.flatnonzero(positive[1:] != positive[:-1])
    return [float(us[i + 1]) for i in idx]


def sign_changes(orders: OrderPair, a: float, b: float, n: int) -> List[float]:
    """Points t in (a, b) where p - r changes sign, ascending"""
    return [b - u for u in crossing_offsets(orders, a, b, n)]


def _random_spec(rng: np.random.Generator, orders: OrderPair) -> bounds.ProblemSpec:
    a = rng.uniform(-1.0, 1.0)
    b = a + rng.uniform(0.2, 3.0)
    g = RealFn.polynomial(rng.uniform(-2.0, 2.0, size=3))
    f = RealFn.const(rng.uniform(-3.0, 3.0))
    return bounds.ProblemSpec(a, b, f, g, orders)


def run_verification(config_manager: ConfigManager) -> Dict:
    """
    Run every check

    Returns:
        Dictionary with pass and fail counts and one record per check
    """
    logger.info("Starting verification suite")
    return Verifier(config_manager).run()

"""Sweep orchestration: zero-free radii against the first-zero scanner"""
import logging
import math
import multiprocessing as mp
from datetime import datetime
from typing import Dict, List, Optional, Sequence

from fracvp.config_manager import ConfigManager
from fracvp.errors import DomainError, FracVPError
from fracvp.fracops import EXCESS_SNAP, OrderPair
from fracvp.quad import QuadConfig
from fracvp.zeros import ml_first_zero, nu_general, radius_classical, radius_improved

logger = logging.getLogger(__name__)

# a scanned zero below its radius by more than this counts as a violation
VIOLATION_SLACK = 1e-6


def _classical_row(alpha: float, lambda_max: float, refine_tol: float, ml_tol: float) -> Dict:
    scan = ml_first_zero(alpha, 2.0, lambda_max, refine_tol, ml_tol)
    classical = radius_classical(alpha)
    improved = radius_improved(alpha)
    best = classical if improved is None else max(classical, improved)
    margin = None if scan.first_zero is None else scan.first_zero - best
    return {
        'alpha': alpha,
        'beta': None,
        'radius_thm69': classical,
        'radius_improved': improved,
        'nu': None,
        'first_zero': scan.first_zero,
        'margin': margin,
        'evaluations': scan.evaluations,
        'violation': margin is not None and margin < -VIOLATION_SLACK,
    }


def _fractional_row(alpha: float, beta: float, lambda_max: float, refine_tol: float,
                    ml_tol: float, quad_cfg: QuadConfig) -> Dict:
    orders = OrderPair.fractional(alpha, beta)
    nu = nu_general(orders, quad_cfg)
    scan = ml_first_zero(1.0 + orders.excess, alpha, lambda_max, refine_tol, ml_tol)
    margin = None if scan.first_zero is None else scan.first_zero - nu
    return {
        'alpha': alpha,
        'beta': beta,
        'radius_thm69': None,
        'radius_improved': None,
        'nu': nu,
        'first_zero': scan.first_zero,
        'margin': margin,
        'evaluations': scan.evaluations,
        'violation': margin is not None and margin < -VIOLATION_SLACK,
    }


def _skipped_row(alpha: float, beta: float) -> Dict:
    return {
        'alpha': alpha,
        'beta': beta,
        'radius_thm69': None,
        'radius_improved': None,
        'nu': None,
        'first_zero': None,
        'margin': None,
        'evaluations': 0,
        'violation': False,
    }


def _sweep_row(task) -> Dict:
    alpha, beta, lambda_max, refine_tol, ml_tol, quad_cfg = task
    if beta is None:
        row = _classical_row(alpha, lambda_max, refine_tol, ml_tol)
    elif not admissible(alpha, beta):
        return _skipped_row(alpha, beta)
    else:
        row = _fractional_row(alpha, beta, lambda_max, refine_tol, ml_tol, quad_cfg)
    logger.debug(f"Sweep point alpha={alpha}, beta={beta}: first_zero={row['first_zero']}, margin={row['margin']}")
    return row


def admissible(alpha: float, beta: float) -> bool:
    """Whether (alpha, beta) satisfies 1 < alpha <= 2, 0 < beta <= 1, alpha - beta - 1 >= 0"""
    return 1 < alpha <= 2 and 0 < beta <= 1 and alpha - beta - 1 >= -EXCESS_SNAP


class SweepManager:
    """Runs order sweeps comparing the scanned first zero with the proven radii"""

    def __init__(self, config_manager: ConfigManager):
        self.config = config_manager

    @staticmethod
    def grid(start: float, stop: float, step: float) -> List[float]:
        """Inclusive grid start, start+step, ..., stop, rounded to 12 decimals"""
        if not step > 0:
            raise DomainError(f"grid step must be positive, got {step!r}")
        if stop < start:
            raise DomainError(f"grid needs start <= stop, got {start!r} > {stop!r}")
        count = math.floor((stop - start) / step + 1e-9)
        return [round(start + k * step, 12) for k in range(count + 1)]

    def tasks(self, alphas: Sequence[float], betas: Optional[Sequence[float]] = None,
              lambda_max: float = None, refine_tol: float = None) -> List[tuple]:
        """Grid points to scan, in output order"""
        lambda_max = lambda_max if lambda_max is not None else self.config.get('scan', 'lambda_max')
        refine_tol = refine_tol if refine_tol is not None else self.config.get('scan', 'refine_tol')
        ml_tol = self.config.get('ml', 'abs_tol')
        quad_cfg = self.config.quad_config()

        for alpha in alphas:
            if not 1 < alpha <= 2:
                raise DomainError(f"sweep alpha must lie in (1, 2], got {alpha!r}")
        if betas is None:
            return [(alpha, None, lambda_max, refine_tol, ml_tol, quad_cfg) for alpha in alphas]
        tasks = []
        for alpha in alphas:
            for beta in betas:
                if not admissible(alpha, beta):
                    logger.warning(f"Skipping inadmissible pair alpha={alpha}, beta={beta}: "
                                   f"needs 0 < beta <= 1 and alpha - beta - 1 >= 0")
                tasks.append((alpha, beta, lambda_max, refine_tol, ml_tol, quad_cfg))
        return tasks

    def run(self, alphas: Sequence[float], betas: Optional[Sequence[float]] = None,
            lambda_max: float = None, refine_tol: float = None, workers: int = None) -> Dict:
        """
        Scan every grid point and compare against its radius

        Args:
            alphas: alpha grid
            betas: beta grid; when given, every (alpha, beta) pair gets a row and
                admissible pairs compare E_{alpha-beta,alpha} against nu.
                Inadmissible pairs keep empty radius and zero cells
            lambda_max: Scan limit (default from config)
            refine_tol: Zero refinement tolerance (default from config)
            workers: Process count (default from config); rows keep grid order

        Returns:
            Dictionary with sweep results
        """
        result = {
            'success': False,
            'rows': [],
            'violations': 0,
            'error': None,
            'timestamp': datetime.now().isoformat()
        }

        try:
            tasks = self.tasks(alphas, betas, lambda_max, refine_tol)
            workers = workers if workers is not None else self.config.get('sweep', 'workers', default=1)
            logger.info(f"Starting sweep over {len(tasks)} points (workers={workers})")

            if workers > 1 and len(tasks) > 1:
                with mp.Pool(processes=workers) as pool:
                    rows = list(pool.map(_sweep_row, tasks))
            else:
                rows = [_sweep_row(task) for task in tasks]

            result['rows'] = rows
            result['violations'] = sum(1 for row in rows if row['violation'])
            result['success'] = True

            if result['violations']:
                logger.warning(f"Sweep finished with {result['violations']} violations")
            else:
                logger.info(f"Sweep finished: {len(rows)} points, no violations")

        except FracVPError as e:
            logger.error(f"Error during sweep: {e}")
            result['error'] = f"{e.kind}: {e}"

        return result

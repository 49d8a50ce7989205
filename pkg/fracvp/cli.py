"""Command-line front end"""
import argparse
import io
import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Dict, List, Optional, TextIO

from fracvp import bounds, zeros
from fracvp.config_manager import ConfigManager
from fracvp.errors import FracVPError
from fracvp.fracops import OrderPair, RealFn
from fracvp.report import emit_csv, emit_json, emit_plain
from fracvp.specfun import MLParams, ml_eval_report
from fracvp.sweep_manager import SweepManager
from fracvp.tabulated_csv import SweepCSV, load_tabulated
from fracvp.verification import run_verification

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VERIFICATION_FAILED = 2
EXIT_PARSE_ERROR = 3

FORMATS = ('json', 'csv', 'plain')

# subcommand name -> descriptive alias
BOUND_KINDS = (
    ('vp', None, "Classical M1(b-a) + M2(b-a)^2/2"),
    ('hw', None, "beta = 1 integral form"),
    ('thm31', 'second-order', "x'' + g D^beta x + f x = 0"),
    ('main', 'fractional', "D^alpha x + g D^beta x + f x = 0"),
    ('lyapunov', None, "D^alpha x + f x = 0, g must vanish"),
)
RADIUS_KINDS = (
    ('thm69', 'classical', "Gamma(alpha) alpha^alpha/(alpha-1)^(alpha-1) for E_{alpha,2}"),
    ('improved', None, "Gamma(alpha)(1+alpha) below alpha_bar"),
    ('best', None, "Larger of thm69 and improved"),
    ('nu', None, "Zero-free radius of E_{alpha-beta,alpha}"),
)
CANONICAL_KINDS = {alias: name for name, alias, _ in BOUND_KINDS + RADIUS_KINDS if alias}


class UsageError(Exception):
    """Raised instead of argparse's print-and-exit"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common_options() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument('--format', choices=FORMATS, default=None,
                        help="Output format (default: json; csv for sweep)")
    common.add_argument('--out', default=None, help="Write the report to this file instead of stdout")
    return common


def _coefficient_options(parser: argparse.ArgumentParser):
    for name in ('g', 'f'):
        group = parser.add_mutually_exclusive_group()
        group.add_argument(f'--{name}-const', type=float, dest=f'{name}_const', default=None,
                           help=f"Constant coefficient {name} (default: 0)")
        group.add_argument(f'--{name}-csv', dest=f'{name}_csv', default=None,
                           help=f"Tabulated coefficient {name} from a t,value CSV file")


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _Parser(prog='fracvp', description="Fractional de la Vallee Poussin inequalities: "
                                                "bounds, zero-free radii and their verification")
    commands = parser.add_subparsers(dest='command', required=True, metavar='command')

    p = commands.add_parser('ml-eval', parents=[common], help="Evaluate E_{order,shift}(arg)")
    p.add_argument('--order', type=float, required=True)
    p.add_argument('--shift', type=float, required=True)
    p.add_argument('--arg', type=float, required=True, dest='argument')
    p.add_argument('--tol', type=float, default=None, help="Truncation tolerance (default from config)")

    p = commands.add_parser('ml-zero', parents=[common], help="First zero of lambda -> E_{order,shift}(-lambda)")
    p.add_argument('--order', type=float, required=True)
    p.add_argument('--shift', type=float, required=True)
    p.add_argument('--lambda-max', type=float, default=None, dest='lambda_max')
    p.add_argument('--tol', type=float, default=None, help="Refinement tolerance (default from config)")

    p = commands.add_parser('bound', help="Inequality right-hand sides")
    kinds = p.add_subparsers(dest='kind', required=True, metavar='kind')
    for kind, alias, help_text in BOUND_KINDS:
        k = kinds.add_parser(kind, aliases=[alias] if alias else [], parents=[common], help=help_text)
        k.add_argument('--a', type=float, required=True)
        k.add_argument('--b', type=float, required=True)
        k.add_argument('--alpha', type=float, default=None)
        k.add_argument('--beta', type=float, default=None)
        k.add_argument('--non-strict', action='store_true', dest='non_strict',
                       help="Non-strict form, valid for any nontrivial solution")
        _coefficient_options(k)

    p = commands.add_parser('radius', help="Zero-free radii")
    kinds = p.add_subparsers(dest='kind', required=True, metavar='kind')
    for kind, alias, help_text in RADIUS_KINDS:
        k = kinds.add_parser(kind, aliases=[alias] if alias else [], parents=[common], help=help_text)
        k.add_argument('--alpha', type=float, required=True)
        k.add_argument('--beta', type=float, default=None, required=(kind == 'nu'))

    p = commands.add_parser('const', help="Implicit constants")
    kinds = p.add_subparsers(dest='kind', required=True, metavar='kind')
    k = kinds.add_parser('alpha-bar', parents=[common])
    k.add_argument('--tol', type=float, default=1e-12)

    p = commands.add_parser('sweep', parents=[common], help="Scanner against radii over an order grid")
    p.add_argument('--alpha-from', type=float, required=True, dest='alpha_from')
    p.add_argument('--alpha-to', type=float, required=True, dest='alpha_to')
    p.add_argument('--alpha-step', type=float, required=True, dest='alpha_step')
    p.add_argument('--beta-from', type=float, default=None, dest='beta_from')
    p.add_argument('--beta-to', type=float, default=None, dest='beta_to')
    p.add_argument('--beta-step', type=float, default=None, dest='beta_step')
    p.add_argument('--lambda-max', type=float, default=None, dest='lambda_max')
    p.add_argument('--tol', type=float, default=None)
    p.add_argument('--workers', type=int, default=None)

    commands.add_parser('verify', parents=[common], help="Run the full invariant suite")
    return parser


class Command:
    """One parsed invocation"""

    def __init__(self, args: argparse.Namespace, config_manager: ConfigManager):
        self.args = args
        self.config = config_manager
        self.cfg = config_manager.quad_config()

    def _coefficient(self, name: str) -> RealFn:
        path = getattr(self.args, f'{name}_csv')
        if path:
            return load_tabulated(path)
        value = getattr(self.args, f'{name}_const')
        return RealFn.const(0.0 if value is None else value)

    def _require(self, *names):
        missing = [f"--{n}" for n in names if getattr(self.args, n) is None]
        if missing:
            raise UsageError(f"bound {self.args.kind} requires {', '.join(missing)}")

    def ml_eval(self) -> Dict:
        tol = self.args.tol if self.args.tol is not None else self.config.get('ml', 'abs_tol')
        params = MLParams(self.args.order, self.args.shift, self.args.argument)
        return ml_eval_report(params, tol).to_dict()

    def ml_zero(self) -> Dict:
        a = self.args
        lambda_max = a.lambda_max if a.lambda_max is not None else self.config.get('scan', 'lambda_max')
        tol = a.tol if a.tol is not None else self.config.get('scan', 'refine_tol')
        scan = zeros.ml_first_zero(a.order, a.shift, lambda_max, tol, self.config.get('ml', 'abs_tol'))
        return scan.to_dict()

    def bound(self) -> Dict:
        a = self.args
        kind = CANONICAL_KINDS.get(a.kind, a.kind)
        if kind == 'thm31':
            self._require('beta')
            orders = OrderPair.second_order(a.beta)
        elif kind == 'main':
            self._require('alpha', 'beta')
            orders = OrderPair.fractional(a.alpha, a.beta)
        elif kind == 'lyapunov':
            self._require('alpha')
            orders = OrderPair.no_middle_term(a.alpha)
        else:
            orders = OrderPair.second_order(1.0)

        spec = bounds.ProblemSpec(a.a, a.b, self._coefficient('f'), self._coefficient('g'),
                                  orders, strict=not a.non_strict)
        if kind == 'vp':
            report = bounds.vp_report(spec)
        elif kind == 'hw':
            report = bounds.hw_rhs(spec, self.cfg)
        elif kind == 'thm31':
            report = bounds.second_order_rhs(spec, self.cfg)
        elif kind == 'main':
            report = bounds.fractional_rhs(spec, self.cfg)
        else:
            report = bounds.lyapunov_report(spec, self.cfg)
        return report.to_dict()

    def radius(self) -> Dict:
        a = self.args
        kind = CANONICAL_KINDS.get(a.kind, a.kind)
        if kind == 'thm69':
            value = zeros.radius_classical(a.alpha)
        elif kind == 'improved':
            value = zeros.radius_improved(a.alpha)
        elif kind == 'best':
            value = zeros.best_radius(a.alpha)
        else:
            orders = OrderPair.no_middle_term(a.alpha) if a.beta == 0 else OrderPair.fractional(a.alpha, a.beta)
            value = zeros.nu_general(orders, self.cfg)
        return {'radius': value}

    def const(self) -> Dict:
        return {'alpha_bar': zeros.alpha_bar(self.args.tol)}

    def sweep(self) -> Dict:
        a = self.args
        manager = SweepManager(self.config)
        alphas = manager.grid(a.alpha_from, a.alpha_to, a.alpha_step)
        beta_flags = (a.beta_from, a.beta_to, a.beta_step)
        if any(v is not None for v in beta_flags) and not all(v is not None for v in beta_flags):
            raise UsageError("--beta-from, --beta-to and --beta-step go together")
        betas = manager.grid(*beta_flags) if a.beta_from is not None else None
        result = manager.run(alphas, betas, a.lambda_max, a.tol, a.workers)
        if not result['success']:
            kind, _, reason = result['error'].partition(': ')
            error = FracVPError(reason)
            error.kind = kind
            raise error
        rows = [{col: row[col] for col in SweepCSV.COLUMNS} for row in result['rows']]
        return {'rows': rows, 'violations': result['violations']}

    def verify(self) -> Dict:
        return run_verification(self.config)

    def execute(self) -> Dict:
        handler = {
            'ml-eval': self.ml_eval,
            'ml-zero': self.ml_zero,
            'bound': self.bound,
            'radius': self.radius,
            'const': self.const,
            'sweep': self.sweep,
            'verify': self.verify,
        }[self.args.command]
        return handler()


def render(payload: Dict, command: str, fmt: Optional[str]) -> str:
    """Report text for one command in the requested format"""
    fmt = fmt or ('csv' if command == 'sweep' else 'json')
    if fmt == 'json':
        return emit_json(payload) + '\n'
    if fmt == 'plain':
        return emit_plain(payload) + '\n'
    if command == 'sweep':
        buffer = io.StringIO()
        SweepCSV().write(payload['rows'], buffer)
        return buffer.getvalue()
    if command == 'verify':
        return emit_csv(payload['checks'], ['name', 'passed', 'detail'])
    return emit_csv([payload], list(payload))


def _diagnose(stderr: TextIO, kind: str, reason) -> None:
    reason = ' '.join(str(reason).split())
    stderr.write(f"fracvp: {kind}: {reason}\n")


def run(argv: Optional[List[str]] = None, config_manager: ConfigManager = None,
        stdout: TextIO = None, stderr: TextIO = None) -> int:
    """
    Parse argv, run the command and emit its report

    Returns:
        Exit status: 0 success, 1 library error, 2 verification failure or
        sweep violation, 3 parse error
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        _diagnose(stderr, 'parse_error', e)
        return EXIT_PARSE_ERROR

    config_manager = config_manager or ConfigManager()
    try:
        payload = Command(args, config_manager).execute()
        text = render(payload, args.command, args.format)
        if args.out:
            with open(args.out, 'w', newline='', encoding='utf-8') as fh:
                fh.write(text)
            logger.info(f"Report written to {args.out}")
        else:
            stdout.write(text)
    except UsageError as e:
        _diagnose(stderr, 'parse_error', e)
        return EXIT_PARSE_ERROR
    except FracVPError as e:
        logger.debug(f"{args.command} failed", exc_info=True)
        _diagnose(stderr, e.kind, e)
        return EXIT_ERROR
    except OSError as e:
        _diagnose(stderr, 'io_error', e)
        return EXIT_ERROR
    except Exception as e:
        logger.debug(f"Unexpected failure in {args.command}", exc_info=True)
        _diagnose(stderr, 'internal_error', f"{type(e).__name__}: {e}")
        return EXIT_ERROR

    if args.command == 'verify' and payload['failed']:
        _diagnose(stderr, 'verification_failed', f"{payload['failed']} of "
                  f"{payload['passed'] + payload['failed']} checks failed")
        return EXIT_VERIFICATION_FAILED
    if args.command == 'sweep' and payload['violations']:
        _diagnose(stderr, 'verification_failed', f"{payload['violations']} sweep points below their radius")
        return EXIT_VERIFICATION_FAILED
    return EXIT_OK


CONSOLE_HANDLER = 'fracvp.console'


def setup_logging(config_manager: ConfigManager = None):
    """
    Configure logging; stdout stays reserved for reports

    Called once without a config so that configuration warnings already go
    through the console handler, then again with it to apply the configured
    level and the optional rotating log file.
    """
    log_config = config_manager.config.get('logging', {}) if config_manager else {}
    log_level = getattr(logging, str(log_config.get('level', 'WARNING')).upper(), logging.WARNING)
    log_file = log_config.get('file', '')
    max_bytes = log_config.get('max_bytes', 10485760)
    backup_count = log_config.get('backup_count', 5)

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)

    # Console handler
    console_handler = next((h for h in root_logger.handlers if h.get_name() == CONSOLE_HANDLER), None)
    if console_handler is None:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.set_name(CONSOLE_HANDLER)
        console_handler.setFormatter(logging.Formatter(
            '[%(asctime)s] %(levelname)s [%(name)s] %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        ))
        root_logger.addHandler(console_handler)
    console_handler.setLevel(log_level)

    if not log_file:
        return

    # File handler with rotation
    try:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(
            log_file,
            maxBytes=max_bytes,
            backupCount=backup_count
        )
        file_handler.setLevel(log_level)
        file_handler.setFormatter(logging.Formatter(
            '[%(asctime)s] %(levelname)s [%(name)s:%(lineno)d] %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        ))
        root_logger.addHandler(file_handler)
    except OSError as e:
        logger.warning(f"Could not set up file logging: {e}")

    logger.debug("Logging configured")


def main(argv: Optional[List[str]] = None):
    """Command-line entry point"""
    setup_logging()
    config_manager = ConfigManager()
    setup_logging(config_manager)
    try:
        status = run(argv, config_manager)
    except KeyboardInterrupt:
        _diagnose(sys.stderr, 'interrupted', "keyboard interrupt")
        status = 130
    sys.exit(status)

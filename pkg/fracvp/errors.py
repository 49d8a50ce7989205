"""Exception hierarchy shared by every fracvp module"""


class FracVPError(Exception):
    """Base class for all library errors"""

    kind = 'error'


class DomainError(FracVPError, ValueError):
    """An argument lies outside the domain of the operation"""

    kind = 'domain_error'


class PoleError(DomainError):
    """Gamma (or a power rule built on it) evaluated at a pole"""

    kind = 'pole_error'


class ArgumentRangeError(DomainError):
    """The series evaluator refuses arguments beyond its configured range"""

    kind = 'argument_range'


class SeriesConvergenceError(FracVPError):
    """Series terms overflowed the guard before they started to decay"""

    kind = 'series_convergence'


class QuadratureError(FracVPError):
    """Adaptive quadrature did not meet its tolerance

    The best estimate is kept on ``result`` so callers can record it.
    """

    kind = 'quadrature_error'

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class NonFiniteIntegrandError(QuadratureError):
    """Integrand returned NaN or infinity at an interior node"""

    kind = 'non_finite_integrand'


class StepUnderflowError(FracVPError):
    """Finite-difference stencil cannot be formed at the requested point"""

    kind = 'step_underflow'


class BracketError(FracVPError):
    """No sign change where one is required"""

    kind = 'bracket_error'


class CSVFormatError(DomainError):
    """Malformed tabulated-function CSV"""

    kind = 'csv_format'

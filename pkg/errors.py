"""
Exception hierarchy for the orlicz_eig toolkit.

Configuration problems (bad family specs, invalid intervals, inadmissible
Young functions) derive from ConfigError and map to CLI exit code 2.
Numerical failures derive from NumericalError and map to exit code 1.
"""


class OrliczEigError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ConfigError(OrliczEigError):
    """Invalid experiment configuration or precondition violation."""

    exit_code = 2


class SpecParseError(ConfigError):
    """A `family:param,...` Young-function spec could not be parsed."""


class InvalidParameterError(ConfigError):
    """An exponent <= 1, a coefficient <= 0, or another invalid parameter."""


class InvalidIntervalError(ConfigError):
    """Mesh interval with a >= b or too few elements."""


class AdmissionError(ConfigError):
    """Young function not admitted for the requested fractional order."""


class WrongFamilyError(ConfigError):
    """Operation restricted to a family the Young function does not belong to."""


class NumericalError(OrliczEigError):
    """A computation failed to meet its numerical contract."""

    exit_code = 1


class ValidationError(NumericalError):
    """Sampled Young-function invariants failed."""


class RootBracketError(NumericalError):
    """g^{-1}(t) could not be bracketed within the configured bounds."""


class QuadratureError(NumericalError):
    """Adaptive quadrature exhausted its refinement budget."""


class NonFiniteValueError(NumericalError):
    """A function produced NaN or infinite values where finite ones are required."""


class ConvergenceError(NumericalError):
    """An iteration exhausted its budget or lost monotonicity."""

    def __init__(self, message: str, diagnostics: dict = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ZeroFieldError(NumericalError):
    """Operation requires a nonzero field."""


class SolverError(NumericalError):
    """Solver output violates a structural guarantee."""

"""Exception taxonomy shared by all superhet modules.

The CLI maps these onto stable exit codes: config problems exit 2,
numerical/fit problems exit 3, I/O problems exit 4.
"""


class SuperhetError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SuperhetError, ValueError):
    """Input outside the mathematical domain of an operation."""


class ConfigError(SuperhetError):
    """Configuration file cannot be parsed or violates an invariant."""

    def __init__(self, message, *, field=None, line=None):
        self.field = field
        self.line = line
        prefix = ""
        if field is not None:
            prefix = f"{field}: "
        if line is not None:
            prefix = f"line {line}: " + prefix
        super().__init__(prefix + message)


class AlignmentError(SuperhetError):
    """Two spectra do not share a common frequency grid / bandwidth."""


class ExtractionError(SuperhetError):
    """A spectral feature (peak, width) cannot be extracted."""


class CalibrationError(SuperhetError):
    """Dressed-state doublet unresolved; field calibration impossible."""


class FitError(SuperhetError):
    """Least-squares problem is degenerate or under-determined."""


class NumericalError(SuperhetError):
    """A numerical routine failed to converge within its budget."""

    def __init__(self, message, *, estimate=None):
        self.estimate = estimate
        if estimate is not None:
            message = f"{message} (achieved error estimate {estimate:.3e})"
        super().__init__(message)

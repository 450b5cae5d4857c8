"""Exception hierarchy shared across the package."""


class CoxScreenError(Exception):
    """Base class for all errors raised by coxscreen."""


class ValidationError(CoxScreenError):
    """Input data violates a structural invariant (bad status, NaN, n too small, ...)."""


class CSVParseError(ValidationError):
    """A CSV cell or header could not be parsed; message names the offending location."""


class NonIdentifiableError(CoxScreenError):
    """The observed information is (numerically) singular; the fit is not identifiable."""


class SeparationError(CoxScreenError):
    """Monotone-likelihood divergence: a coefficient ran away past the configured bound."""

    def __init__(self, coordinate, message=None):
        self.coordinate = coordinate
        super().__init__(message or f"separation detected in coordinate {coordinate}")


class CalibrationError(CoxScreenError):
    """Censoring calibration could not reach the requested target within the bracket."""


class ConfigError(CoxScreenError):
    """Invalid run configuration (CLI flags, config files, thresholds)."""

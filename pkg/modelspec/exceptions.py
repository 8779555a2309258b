from numerics.exceptions import WaveError


class ConfigError(WaveError):
    """Raised when a model configuration file cannot be read or validated."""

    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = errors or {}


class CornerDerivativeError(WaveError):
    def __init__(self, message, which=None, value=None):
        super().__init__(message)
        self.which = which
        self.value = value


class DegenerateCornerDerivative(CornerDerivativeError):
    """A corner derivative such as g'(0) vanishes."""


class UnboundedCornerDerivative(CornerDerivativeError):
    """A corner derivative such as g'(0) is infinite."""


class NonPositiveEstimate(WaveError):
    pass


class AssumptionViolation(WaveError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report

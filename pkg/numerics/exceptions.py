class WaveError(Exception):
    """Base class for every error raised by the degenwave apps."""


class IntegrationError(WaveError):
    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class StepSizeUnderflow(IntegrationError):
    """The step size collapsed, usually at a singularity of the right side."""


class MaxStepsExceeded(IntegrationError):
    pass


class NonFiniteState(IntegrationError):
    pass


class NonConvergence(WaveError):
    pass


class BadBracket(WaveError):
    def __init__(self, message, lo=None, hi=None):
        super().__init__(message)
        self.lo = lo
        self.hi = hi

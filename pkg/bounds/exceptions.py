from numerics.exceptions import WaveError


class UnsupportedGamma(WaveError):
    """Closed forms for the lower bound exist only for gamma = 1."""


class UnboundedRatio(WaveError):
    def __init__(self, message, ratio=None, at=None):
        super().__init__(message)
        self.ratio = ratio
        self.at = at

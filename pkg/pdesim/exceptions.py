from numerics.exceptions import NonFiniteState, WaveError

__all__ = ["CflViolation", "FrontLost", "NonFiniteState"]


class CflViolation(WaveError):
    def __init__(self, message, t=None, dt=None):
        super().__init__(message)
        self.t = t
        self.dt = dt


class FrontLost(WaveError):
    """The b = 1/2 level set never formed or left the domain."""

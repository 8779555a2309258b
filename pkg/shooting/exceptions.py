from numerics.exceptions import WaveError


class NotShootable(WaveError):
    """The model lacks finite positive corner derivatives for the launch series."""


class SingularLaunch(WaveError):
    def __init__(self, message, eps=None, launch_value=None):
        super().__init__(message)
        self.eps = eps
        self.launch_value = launch_value


class Inconclusive(WaveError):
    """B at the stop point falls in the band between the admissibility thresholds."""

    def __init__(self, message, speed=None, B_end=None, A_thr=None, delta=None):
        super().__init__(message)
        self.speed = speed
        self.B_end = B_end
        self.A_thr = A_thr
        self.delta = delta


class NotAdmissible(WaveError):
    def __init__(self, message, speed=None):
        super().__init__(message)
        self.speed = speed

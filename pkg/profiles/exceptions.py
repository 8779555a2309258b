from numerics.exceptions import WaveError
from shooting.exceptions import NotAdmissible

__all__ = ["Indeterminate", "NotAdmissible"]


class Indeterminate(WaveError):
    """The front-edge integral neither settles nor diverges clearly."""

    def __init__(self, message, ratios=None):
        super().__init__(message)
        self.ratios = ratios or []

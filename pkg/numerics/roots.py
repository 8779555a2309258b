from dataclasses import dataclass, field
from typing import Callable, List, Tuple

from .exceptions import BadBracket


@dataclass
class Bracket:
    lo: float
    hi: float
    evaluations: List[Tuple[float, bool]] = field(default_factory=list)

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def midpoint(self):
        return 0.5 * (self.lo + self.hi)


def bisect_monotone(predicate: Callable[[float], bool], lo: float, hi: float, tol: float) -> Bracket:
    """Shrink ``[lo, hi]`` around the switch of a false-then-true predicate.

    Both endpoints are evaluated, so the returned bracket always has
    ``predicate(lo) is False`` and ``predicate(hi) is True``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if not lo < hi:
        raise BadBracket(f"Empty bracket [{lo}, {hi}]", lo, hi)

    evaluations = []

    def evaluate(x):
        value = bool(predicate(x))
        evaluations.append((x, value))
        return value

    if evaluate(lo):
        raise BadBracket(f"Predicate already true at lower end {lo}", lo, hi)
    if not evaluate(hi):
        raise BadBracket(f"Predicate still false at upper end {hi}", lo, hi)

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if evaluate(mid):
            hi = mid
        else:
            lo = mid
    return Bracket(lo, hi, evaluations)

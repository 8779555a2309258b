"""
Threshold speed by bisection on the admissibility predicate.

Admissible speeds form a half-line [c0, inf), so the predicate "the shot at
c reaches B = 0" is false then true on [c_sharp, c_star].
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

from bounds.estimates import compute_bounds
from modelspec.audit import require_audited
from numerics.conf import get_setting
from numerics.exceptions import BadBracket
from numerics.roots import bisect_monotone

from .exceptions import Inconclusive, NotShootable
from .shots import ShotResult, is_admissible, is_monotone_predicate, shoot

logger = logging.getLogger(__name__)

SEED_MARGIN = 1e-3
MIN_SPEED = 1e-8
MAX_REFINEMENTS = 3
# Stop offset used when the bracket is tightened for sharp diagnostics
SHARP_DELTA = 1e-8
CONTAINMENT_TOL = 1e-9


@dataclass
class SpeedReport:
    model_fingerprint: str
    model_family: str
    c_lo: float
    c_hi: float
    c0: float
    bracket_width: float
    c_sharp: float
    c_star: float
    tol_c: float
    eps: float
    delta: float
    evaluations: List[Tuple[float, bool]] = field(default_factory=list)
    shots: List[ShotResult] = field(default_factory=list, repr=False)
    refinements: int = 0

    def _recorded(self, speed):
        """Last recorded verdict at ``speed``, None when it was never evaluated."""
        return dict(self.evaluations).get(speed)

    @property
    def lo_admissible(self):
        return self._recorded(self.c_lo)

    @property
    def hi_admissible(self):
        return self._recorded(self.c_hi)

    @property
    def monotone(self):
        ordered = sorted(self.evaluations)
        return is_monotone_predicate([value for _, value in ordered])

    @property
    def contained(self):
        return (
            self.c_sharp - CONTAINMENT_TOL <= self.c0 <= self.c_star + CONTAINMENT_TOL
        )

    def relative_gap(self, reference):
        return abs(self.c0 - reference) / reference

    def as_dict(self, include_shots=True):
        data = {
            "model_fingerprint": self.model_fingerprint,
            "model_family": self.model_family,
            "c_lo": self.c_lo,
            "c_hi": self.c_hi,
            "lo_admissible": self.lo_admissible,
            "hi_admissible": self.hi_admissible,
            "c0": self.c0,
            "bracket_width": self.bracket_width,
            "c_sharp": self.c_sharp,
            "c_star": self.c_star,
            "tol_c": self.tol_c,
            "eps": self.eps,
            "delta": self.delta,
            "monotone": self.monotone,
            "contained": self.contained,
            "refinements": self.refinements,
            "evaluations": [
                {"speed": speed, "admissible": value} for speed, value in self.evaluations
            ],
        }
        if include_shots:
            data["shots"] = [shot.as_dict() for shot in self.shots]
        return data


class AdmissibilityPredicate:
    """Memoized ``c -> is_admissible(shoot(c))`` with delta refinement.

    An Inconclusive shot is re-shot with delta / 10, at most MAX_REFINEMENTS
    times, before the status is surfaced.
    """

    def __init__(self, m, eps, delta, config=None, shoot_fn: Callable = shoot):
        self.m = m
        self.eps = eps
        self.delta = delta
        self.config = config
        self.shoot_fn = shoot_fn
        self.memo = {}
        self.shots = []
        self.refinements = 0

    def __call__(self, c):
        if c in self.memo:
            return self.memo[c]
        delta = self.delta
        for attempt in range(MAX_REFINEMENTS + 1):
            shot = self.shoot_fn(self.m, c, self.eps, delta, self.config)
            self.shots.append(shot)
            try:
                value = is_admissible(shot)
                break
            except Inconclusive:
                if attempt == MAX_REFINEMENTS:
                    logger.error(
                        "Speed %.10g still inconclusive after %d refinements", c, attempt
                    )
                    raise
                delta /= 10.0
                self.refinements += 1
                logger.warning("Inconclusive at c=%.10g, retrying with delta=%.1e", c, delta)
        self.memo[c] = value
        return value

    @property
    def evaluations(self):
        return list(self.memo.items())


def _build_report(m, bracket, c_sharp, c_star, predicate, tol_c, eps, delta):
    shots = sorted(predicate.shots, key=lambda shot: (shot.speed, shot.delta))
    report = SpeedReport(
        model_fingerprint=m.fingerprint,
        model_family=str(m.family_tag),
        c_lo=bracket.lo,
        c_hi=bracket.hi,
        c0=bracket.midpoint,
        bracket_width=bracket.width,
        c_sharp=c_sharp,
        c_star=c_star,
        tol_c=tol_c,
        eps=eps,
        delta=delta,
        evaluations=predicate.evaluations,
        shots=shots,
        refinements=predicate.refinements,
    )
    if not report.monotone:
        logger.warning("Admissibility is not monotone across the sampled speeds")
    if not report.contained:
        logger.warning(
            "c0=%.10g outside [c_sharp, c_star] = [%.10g, %.10g]",
            report.c0,
            report.c_sharp,
            report.c_star,
        )
    return report


def find_threshold(
    m,
    tol_c: Optional[float] = None,
    eps: Optional[float] = None,
    delta: Optional[float] = None,
    config=None,
    bounds=None,
    shoot_fn: Callable = shoot,
) -> SpeedReport:
    """Bisect between the bounds down to a bracket of width ``tol_c``."""
    require_audited(m)
    if not m.shootable:
        raise NotShootable(f"{m.family_tag} supports bounds only")
    tol_c = get_setting("TOL_C") if tol_c is None else tol_c
    eps = get_setting("EPS") if eps is None else eps
    delta = get_setting("DELTA") if delta is None else delta
    bounds = bounds or compute_bounds(m)

    lo = max(bounds.c_sharp * (1.0 - SEED_MARGIN), MIN_SPEED)
    hi = bounds.c_star * (1.0 + SEED_MARGIN)
    predicate = AdmissibilityPredicate(m, eps, delta, config, shoot_fn)
    try:
        bracket = bisect_monotone(predicate, lo, hi, tol_c)
    except BadBracket:
        logger.error("Seeds [%.10g, %.10g] do not bracket the threshold", lo, hi)
        raise
    report = _build_report(
        m, bracket, bounds.c_sharp, bounds.c_star, predicate, tol_c, eps, delta
    )
    logger.info(
        "Threshold bracket [%.10g, %.10g], c0=%.10g after %d shots",
        report.c_lo,
        report.c_hi,
        report.c0,
        len(report.shots),
    )
    return report


def refine_threshold(
    m,
    report: SpeedReport,
    tol: Optional[float] = None,
    delta: Optional[float] = None,
    config=None,
    shoot_fn: Callable = shoot,
) -> SpeedReport:
    """Continue the bisection of ``report`` to ``tol`` with a smaller stop offset.

    The smaller offset can make the old admissible end fail; the upper end is
    then walked up with doubling steps until it is admissible again.
    """
    tol = get_setting("SHARP_TOL") if tol is None else tol
    delta = min(report.delta, SHARP_DELTA) if delta is None else delta
    predicate = AdmissibilityPredicate(m, report.eps, delta, config, shoot_fn)

    lo, hi = report.c_lo, report.c_hi
    ceiling = report.c_star * (1.0 + SEED_MARGIN)
    step = max(report.bracket_width, tol)
    while not predicate(hi):
        if hi >= ceiling:
            raise BadBracket(f"No admissible speed up to {ceiling:.10g}", lo, hi)
        lo, hi = hi, min(hi + step, ceiling)
        step *= 2.0
    bracket = bisect_monotone(predicate, lo, hi, tol)

    refined = _build_report(
        m, bracket, report.c_sharp, report.c_star, predicate, tol, report.eps, delta
    )
    logger.info(
        "Refined threshold bracket [%.12g, %.12g] at delta=%.1e",
        refined.c_lo,
        refined.c_hi,
        delta,
    )
    return refined


def threshold_shot(
    m,
    report: SpeedReport,
    delta: Optional[float] = None,
    config=None,
    shoot_fn: Callable = shoot,
) -> ShotResult:
    """Shot at the admissible end of ``report`` with the tail-fit stop offset."""
    delta = get_setting("FIT_DELTA") if delta is None else delta
    return shoot_fn(m, report.c_hi, report.eps, delta, config)


def conjecture_gap(report: SpeedReport, reference: float = math.sqrt(0.5)):
    """Relative distance of c0 from a reference speed; informational only."""
    return report.relative_gap(reference)

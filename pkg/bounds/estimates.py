"""
Lower and upper bounds for the threshold wave speed.

The lower bound c_sharp is the larger of two integral estimates, the upper
bound c_star = 2 sqrt(L2 max g sup h(r)/r). Both are computable from the
model alone, without shooting.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import optimize

from modelspec.audit import require_audited
from numerics.conf import get_setting
from numerics.quadrature import quad_adaptive

from .exceptions import UnboundedRatio, UnsupportedGamma

logger = logging.getLogger(__name__)

RATIO_CAP = 1e12
TIE_RTOL = 1e-8


@dataclass(frozen=True)
class SpeedBounds:
    c_sharp_branch1: float
    c_sharp_branch2: float
    c_sharp: float
    c_star: float
    branch1_error: float = 0.0
    branch2_error: float = 0.0
    max_g: float = math.nan
    sup_h_ratio: float = math.nan
    # sqrt(L1 Mg max g sup h(r)/r / 3), sits between c_sharp and c_star
    intermediate: float = math.nan

    @property
    def dominant_branch(self):
        scale = max(abs(self.c_sharp_branch1), abs(self.c_sharp_branch2), 1e-300)
        if abs(self.c_sharp_branch1 - self.c_sharp_branch2) <= TIE_RTOL * scale:
            return "tie"
        return "1" if self.c_sharp_branch1 > self.c_sharp_branch2 else "2"

    def as_dict(self):
        return {
            "c_sharp_branch1": self.c_sharp_branch1,
            "c_sharp_branch2": self.c_sharp_branch2,
            "c_sharp": self.c_sharp,
            "c_star": self.c_star,
            "branch1_error": self.branch1_error,
            "branch2_error": self.branch2_error,
            "max_g": self.max_g,
            "sup_h_ratio": self.sup_h_ratio,
            "intermediate": self.intermediate,
            "dominant_branch": self.dominant_branch,
        }


def _branch(scale, result):
    value = math.sqrt(max(scale * result.value, 0.0))
    if value == 0.0:
        return 0.0, 0.0
    # d sqrt(K I) = sqrt(K I) dI / (2 I)
    return value, 0.5 * value * result.error_estimate / abs(result.value)


def compute_c_sharp(m, tol: Optional[float] = None):
    """Return ``(branch1, branch2, c_sharp, errors)`` for an audited model."""
    require_audited(m)
    tol = get_setting("QUAD_TOL") if tol is None else tol

    def first(r):
        return m.g(1.0 - r) * m.h(r) * r

    def second(r):
        return (1.0 - r) * m.g(1.0 - r) * m.h(r) * r

    scale = m.L1 * m.Mg
    first_result = quad_adaptive(first, 0.0, 1.0, tol=tol, singular_endpoints="both")
    second_result = quad_adaptive(second, 0.0, 1.0, tol=tol, singular_endpoints="both")
    branch1, error1 = _branch(scale, first_result)
    branch2, error2 = _branch(2.0 * scale, second_result)
    c_sharp = max(branch1, branch2)
    logger.debug("c_sharp branches %.12g, %.12g", branch1, branch2)
    return branch1, branch2, c_sharp, (error1, error2)


def _polish_max(fun, samples, values, xatol):
    """Refine the best sample by bounded scalar search between its neighbours."""
    index = int(np.argmax(values))
    best_x, best = float(samples[index]), float(values[index])
    lo = samples[max(index - 1, 0)]
    hi = samples[min(index + 1, len(samples) - 1)]
    if hi > lo:
        result = optimize.minimize_scalar(
            lambda x: -float(fun(x)),
            bounds=(float(lo), float(hi)),
            method="bounded",
            options={"xatol": xatol},
        )
        if result.success and -result.fun > best:
            best_x, best = float(result.x), float(-result.fun)
    return best_x, best


def max_of_g(m, samples: Optional[int] = None, xatol: float = 1e-10):
    samples = int(samples or get_setting("SAMPLES"))
    grid = np.linspace(0.0, 1.0, samples)
    values = np.asarray(m.g(grid), dtype=float)
    return _polish_max(m.g, grid, values, xatol)


def sup_h_ratio(m, samples: Optional[int] = None, xatol: float = 1e-10):
    """sup over (0, 1] of h(r)/r, with h'(0) as the limit candidate at 0."""
    samples = int(samples or get_setting("SAMPLES"))
    if not math.isfinite(m.dh0):
        raise UnboundedRatio("h(r)/r is unbounded as r -> 0 (h'(0) is infinite)", m.dh0, 0.0)
    grid = np.unique(
        np.concatenate(
            [
                np.geomspace(1e-12, 1.0, samples // 2),
                np.linspace(1.0 / samples, 1.0, samples - samples // 2),
            ]
        )
    )

    def ratio(r):
        return m.h(r) / r

    values = np.asarray(ratio(grid), dtype=float)
    if not np.all(np.isfinite(values)) or np.max(values) > RATIO_CAP:
        index = int(np.nanargmax(np.where(np.isfinite(values), values, np.inf)))
        raise UnboundedRatio(
            f"h(r)/r exceeds {RATIO_CAP:g} near r={grid[index]:.3e}",
            float(values[index]),
            float(grid[index]),
        )
    at, best = _polish_max(ratio, grid, values, xatol)
    if m.dh0 > best:
        at, best = 0.0, float(m.dh0)
    return at, best


def _upper_parts(m, tol):
    xatol = get_setting("QUAD_TOL") if tol is None else tol
    _, max_g = max_of_g(m, xatol=xatol)
    _, ratio = sup_h_ratio(m, xatol=xatol)
    return max_g, ratio


def compute_c_star(m, tol: Optional[float] = None):
    require_audited(m)
    max_g, ratio = _upper_parts(m, tol)
    return 2.0 * math.sqrt(m.L2 * max_g * ratio)


def compute_bounds(m, tol: Optional[float] = None) -> SpeedBounds:
    """Both lower-bound branches, the upper bound and the comparison chain."""
    branch1, branch2, c_sharp, (error1, error2) = compute_c_sharp(m, tol)
    max_g, ratio = _upper_parts(m, tol)
    c_star = 2.0 * math.sqrt(m.L2 * max_g * ratio)
    bounds = SpeedBounds(
        c_sharp_branch1=branch1,
        c_sharp_branch2=branch2,
        c_sharp=c_sharp,
        c_star=c_star,
        branch1_error=error1,
        branch2_error=error2,
        max_g=max_g,
        sup_h_ratio=ratio,
        intermediate=math.sqrt(m.L1 * m.Mg * max_g * ratio / 3.0),
    )
    if not 0.0 < c_sharp <= c_star:
        logger.warning("Bounds out of order: c_sharp=%.6g c_star=%.6g", c_sharp, c_star)
    logger.info("Speed bounds c_sharp=%.10g c_star=%.10g", c_sharp, c_star)
    return bounds


def closed_form_power_law(alpha: float, gamma: float = 1.0, L1: float = 1.0):
    """Exact branches for g(s) = s**alpha, h(r) = r with Mg = 1."""
    if gamma != 1:
        raise UnsupportedGamma(f"Closed forms need gamma = 1, got {gamma!r}")
    a = float(alpha)
    branch1 = math.sqrt(2.0 * L1 / ((a + 1.0) * (a + 2.0) * (a + 3.0)))
    branch2 = math.sqrt(4.0 * L1 / ((a + 2.0) * (a + 3.0) * (a + 4.0)))
    return branch1, branch2

"""
Adaptive Gauss-Kronrod quadrature with geometric refinement toward
integrable endpoint singularities.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .conf import get_setting
from .exceptions import NonConvergence

logger = logging.getLogger(__name__)

SINGULAR_ENDPOINTS = ("none", "left", "right", "both")

# Number of geometric panels placed toward a flagged endpoint
GEOMETRIC_LEVELS = 40
# Narrowest geometric panel, in units of the endpoint spacing
MIN_PANEL_ULPS = 1e3


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    subdivisions: int

    def as_dict(self):
        return {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "subdivisions": self.subdivisions,
        }


def _levels(width, endpoint):
    """Geometric levels whose panels stay resolvable next to ``endpoint``."""
    spacing = MIN_PANEL_ULPS * float(np.spacing(max(1.0, abs(endpoint))))
    if width <= spacing:
        return range(1, 1)
    deepest = int(math.floor(math.log2(width / spacing)))
    return range(1, min(GEOMETRIC_LEVELS, deepest + 1))


def _breakpoints(a, b, singular_endpoints):
    width = b - a
    points = {a, b}
    if singular_endpoints in ("left", "both"):
        points.update(a + width * 2.0**-k for k in _levels(width, a))
    if singular_endpoints in ("right", "both"):
        points.update(b - width * 2.0**-k for k in _levels(width, b))
    return sorted(p for p in points if a <= p <= b)


def _guarded(fun, a, b, singular_endpoints):
    """Move nodes that round onto a flagged endpoint one float inward."""
    left = singular_endpoints in ("left", "both")
    right = singular_endpoints in ("right", "both")
    inner_a = float(np.nextafter(a, b))
    inner_b = float(np.nextafter(b, a))

    def wrapped(x):
        if left and x <= a:
            x = inner_a
        elif right and x >= b:
            x = inner_b
        return fun(x)

    return wrapped


def quad_adaptive(
    fun,
    a: float,
    b: float,
    tol: float = None,
    singular_endpoints: str = "none",
    max_subdivisions: int = None,
) -> QuadResult:
    """Integrate ``fun`` over ``[a, b]``.

    Flagged endpoints get panels whose width halves toward the endpoint, so
    integrands that blow up like ``(x - a)**-0.5`` are resolved panel by panel.
    Raises NonConvergence once the subdivision cap is exhausted.
    """
    if singular_endpoints not in SINGULAR_ENDPOINTS:
        raise ValueError(f"singular_endpoints must be one of {SINGULAR_ENDPOINTS}")
    tol = get_setting("QUAD_TOL") if tol is None else tol
    budget = max_subdivisions or int(get_setting("QUAD_MAX_SUBDIVISIONS"))
    if a == b:
        return QuadResult(0.0, 0.0, 0)
    if b < a:
        flipped = {"left": "right", "right": "left"}.get(singular_endpoints, singular_endpoints)
        result = quad_adaptive(fun, b, a, tol, flipped, budget)
        return QuadResult(-result.value, result.error_estimate, result.subdivisions)

    a, b = float(a), float(b)
    points = _breakpoints(a, b, singular_endpoints)
    fun = _guarded(fun, a, b, singular_endpoints)
    panel_tol = tol / (len(points) - 1)
    total = 0.0
    error = 0.0
    used = 0
    for lo, hi in zip(points[:-1], points[1:]):
        remaining = budget - used
        if remaining <= 0:
            raise NonConvergence(
                f"Subdivision cap {budget} exhausted on [{a}, {b}] at panel [{lo}, {hi}]"
            )
        limit = min(remaining, 500)
        out = integrate.quad(
            fun, lo, hi, epsabs=panel_tol, epsrel=tol, limit=limit, full_output=1
        )
        value, abserr, info = out[0], out[1], out[2]
        used += int(info["last"])
        if len(out) > 3:
            if int(info["last"]) >= limit:
                raise NonConvergence(
                    f"No convergence on panel [{lo}, {hi}] after {limit} subdivisions: {out[3]}"
                )
            logger.debug("quad warning on [%r, %r]: %s", lo, hi, out[3])
        total += value
        error += abserr

    if not np.isfinite(total):
        raise NonConvergence(f"Non-finite integral on [{a}, {b}]")
    return QuadResult(float(total), float(error), used)

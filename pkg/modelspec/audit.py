"""
Sampling-based audit of the structural assumptions on (f, g, h).

The audit is a diagnostic, not a proof: every inequality is checked on a
finite lattice of (0, 1)^2 and reported with its worst violation.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from numerics.conf import get_setting

from .exceptions import AssumptionViolation, NonPositiveEstimate

logger = logging.getLogger(__name__)

VANISHING_TOL = 1e-12
INEQUALITY_TOL = 1e-9
MIN_GRID = 16


@dataclass(frozen=True)
class AssumptionCheck:
    name: str
    passed: bool
    worst_violation: float
    location: Optional[Tuple[float, ...]] = None
    # Non-blocking checks are reported but do not fail the audit
    blocking: bool = True

    def as_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "worst_violation": self.worst_violation,
            "location": list(self.location) if self.location is not None else None,
            "blocking": self.blocking,
        }


@dataclass(frozen=True)
class AssumptionReport:
    checks: Tuple[AssumptionCheck, ...]
    grid_n: int

    @property
    def passed(self):
        return all(check.passed for check in self.checks if check.blocking)

    @property
    def failures(self):
        return [check for check in self.checks if not check.passed]

    def check(self, name):
        for item in self.checks:
            if item.name == name:
                return item
        raise KeyError(name)

    def as_dict(self):
        return {
            "passed": self.passed,
            "grid_n": self.grid_n,
            "checks": [check.as_dict() for check in self.checks],
        }


def interior_grid(grid_n):
    return np.linspace(0.0, 1.0, grid_n + 2)[1:-1]


def _worst(values, points, tol):
    """Check built from an array of violations, positive meaning broken."""
    index = int(np.argmax(values))
    worst = float(max(values.flat[index], 0.0))
    location = tuple(float(axis.flat[index]) for axis in points)
    return worst <= tol, worst, location


def _vanishing(name, values, points):
    passed, worst, location = _worst(np.abs(values), points, VANISHING_TOL)
    return AssumptionCheck(name, passed, worst, location)


def _positive(name, values, points):
    index = int(np.argmin(values))
    lowest = float(values.flat[index])
    location = tuple(float(axis.flat[index]) for axis in points)
    return AssumptionCheck(name, lowest > 0.0, max(-lowest, 0.0), location)


def _g_comparison_violation(g_values, Mg):
    # Mg g(s1) - g(s) maximized over s1 <= s is Mg max_{s1<=s} g(s1) - g(s)
    running_max = np.maximum.accumulate(g_values)
    return Mg * running_max - g_values


def audit_assumptions(m, grid_n: Optional[int] = None) -> AssumptionReport:
    """Check the vanishing, positivity, sandwich and comparison conditions.

    Corner-derivative positivity is reported as a non-blocking check since it
    only gates the shooting launch.
    """
    grid_n = int(grid_n or get_setting("AUDIT_GRID"))
    if grid_n < MIN_GRID:
        raise ValueError(f"grid_n must be at least {MIN_GRID}")

    closed = np.linspace(0.0, 1.0, grid_n)
    interior = interior_grid(grid_n)
    zeros = np.zeros_like(closed)
    s, r = np.meshgrid(interior, interior, indexing="ij")

    with np.errstate(all="ignore"):
        f_values = np.asarray(m.f(s, r), dtype=float)
        g_values = np.asarray(m.g(interior), dtype=float)
        h_values = np.asarray(m.h(interior), dtype=float)
        checks = [
            _vanishing("f_vanishes_at_s0", np.asarray(m.f(zeros, closed)), (zeros, closed)),
            _vanishing("f_vanishes_at_r0", np.asarray(m.f(closed, zeros)), (closed, zeros)),
            _vanishing("g_vanishes_at_0", np.atleast_1d(m.g(0.0)), (np.zeros(1),)),
            _vanishing("h_vanishes_at_0", np.atleast_1d(m.h(0.0)), (np.zeros(1),)),
            _positive("f_positive_interior", f_values, (s, r)),
            _positive("g_positive_interior", g_values, (interior,)),
            _positive("h_positive_interior", h_values, (interior,)),
        ]

        sr = s * r
        for name, violation in (
            ("sandwich_lower", m.L1 * sr - f_values),
            ("sandwich_upper", f_values - m.L2 * sr),
        ):
            passed, worst, location = _worst(violation, (s, r), INEQUALITY_TOL)
            checks.append(AssumptionCheck(name, passed, worst, location))

        mg_ok = 0.0 < m.Mg <= 1.0
        passed, worst, location = _worst(
            _g_comparison_violation(g_values, m.Mg), (interior,), INEQUALITY_TOL
        )
        checks.append(AssumptionCheck("g_comparison", passed and mg_ok, worst, location))

    corner_gap = max(m.L1 - m.dfdn01, m.L1 - m.dfdb10, 0.0)
    checks.append(
        AssumptionCheck(
            "corner_lower_bounds",
            corner_gap <= INEQUALITY_TOL and m.L1 > 0.0,
            corner_gap,
        )
    )

    corner_values = (m.dg0, m.dh0)
    corner_ok = all(math.isfinite(v) and v > 0.0 for v in corner_values)
    checks.append(
        AssumptionCheck(
            "corner_derivatives_positive",
            corner_ok,
            0.0 if corner_ok else max(
                (abs(v) if math.isfinite(v) else math.inf) for v in corner_values
            ),
            blocking=False,
        )
    )

    report = AssumptionReport(tuple(checks), grid_n)
    for failure in report.failures:
        logger.debug(
            "Audit check %s failed: worst %.3e at %s",
            failure.name,
            failure.worst_violation,
            failure.location,
        )
    return report


def estimate_constants(reaction, diff_g, diff_h=None, grid_n: Optional[int] = None):
    """Grid estimates of (L1, L2, Mg), rounded outward by 1%.

    ``diff_h`` is only checked for positivity on the grid.
    """
    grid_n = int(grid_n or get_setting("AUDIT_GRID"))
    interior = interior_grid(grid_n)
    s, r = np.meshgrid(interior, interior, indexing="ij")

    with np.errstate(all="ignore"):
        ratio = np.asarray(reaction(s, r), dtype=float) / (s * r)
        g_values = np.asarray(diff_g(interior), dtype=float)
        running_max = np.maximum.accumulate(g_values)
        positive = running_max > 0.0
        comparison = g_values[positive] / running_max[positive]

    L1 = float(np.min(ratio)) * 0.99
    L2 = float(np.max(ratio)) * 1.01
    Mg = min(float(np.min(comparison)) * 0.99, 1.0) if comparison.size else 0.0

    if diff_h is not None:
        h_values = np.asarray(diff_h(interior), dtype=float)
        if not np.all(h_values > 0.0):
            raise NonPositiveEstimate("h is not positive on the interior grid")
    for name, value in (("L1", L1), ("L2", L2), ("Mg", Mg)):
        if not (math.isfinite(value) and value > 0.0):
            raise NonPositiveEstimate(f"Estimated {name} = {value!r} is not positive")
    return L1, L2, Mg


@lru_cache(maxsize=128)
def _cached_audit(m, grid_n):
    return audit_assumptions(m, grid_n)


def require_audited(m, grid_n: Optional[int] = None) -> AssumptionReport:
    """Audit ``m`` once per grid size and raise if a blocking check fails."""
    grid_n = int(grid_n or get_setting("AUDIT_GRID"))
    report = _cached_audit(m, grid_n)
    if not report.passed:
        names = ", ".join(check.name for check in report.failures if check.blocking)
        raise AssumptionViolation(f"Model fails assumption checks: {names}", report=report)
    return report

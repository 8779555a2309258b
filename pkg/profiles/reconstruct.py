"""
Wave profiles (eta(xi), beta(xi)) rebuilt from a shot.

Along a front c eta' = f(eta, beta) with beta = B(eta), so the travelling
coordinate is xi(eta) = int_{eta0}^{eta} c / f(s, B(s)) ds. beta' follows
from the first integral g(eta) h(beta) beta' + c beta + c eta - c = 0.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import pandas as pd

from numerics.exceptions import NonConvergence
from numerics.quadrature import quad_adaptive
from shooting.shots import ShotResult, is_admissible

from .exceptions import Indeterminate, NotAdmissible

logger = logging.getLogger(__name__)

# Backward window ends where eta drops below this value
ETA_MIN = 1e-8
BARRIER_TOL = 1e-8
PANEL_TOL = 1e-12
FINITE_RATIO = 0.75
INFINITE_RATIO = 0.9
EDGE_DECADES = 3
# Finite-difference audit: tolerance and smallest xi gap, as a fraction of the span
FD_TOL = 1e-3
FD_MIN_GAP = 1e-4


@dataclass(frozen=True)
class FrontEdge:
    finite: bool
    tau_offset: float
    increments: tuple
    ratios: tuple

    @property
    def status(self):
        return "finite" if self.finite else "infinite"

    def as_dict(self):
        return {
            "status": self.status,
            "tau_offset": self.tau_offset if self.finite else None,
            "increments": list(self.increments),
            "ratios": list(self.ratios),
        }


@dataclass
class WaveProfile:
    speed: float
    eta0: float
    xi: np.ndarray
    eta: np.ndarray
    beta: np.ndarray
    dbeta: np.ndarray
    residual: np.ndarray
    tau: float
    tau_status: str
    sigma_equals_tau: bool
    partial: bool = False
    model: object = field(default=None, repr=False, compare=False)

    @property
    def residual_sup(self):
        return float(np.max(np.abs(self.residual))) if self.residual.size else 0.0

    @property
    def edge_slope(self):
        """beta' at the last sample before the front edge."""
        return float(self.dbeta[-1])

    @property
    def barrier_min(self):
        return float(np.min(self.eta + self.beta))

    @property
    def tau_finite(self):
        return self.tau_status == "finite"

    def frame(self):
        return pd.DataFrame(
            {
                "xi": self.xi,
                "eta": self.eta,
                "beta": self.beta,
                "dbeta": self.dbeta,
                "residual": self.residual,
            }
        )

    def as_dict(self):
        return {
            "speed": self.speed,
            "eta0": self.eta0,
            "tau": self.tau if self.tau_finite else None,
            "tau_status": self.tau_status,
            "sigma_equals_tau": self.sigma_equals_tau,
            "residual_sup": self.residual_sup,
            "edge_slope": self.edge_slope,
            "barrier_min": self.barrier_min,
            "xi_min": float(self.xi[0]),
            "xi_max": float(self.xi[-1]),
            "n_samples": int(self.xi.size),
            "partial": self.partial,
        }


def first_integral_residual(m, c, eta, beta, dbeta):
    return m.g(eta) * m.h(beta) * dbeta + c * beta + c * eta - c


def _integrand(m, shot):
    c = shot.speed

    def fun(s):
        return c / float(m.f(s, shot.B_at(s)))

    return fun


def _eta_grid(shot):
    top = shot.eta_end
    grid = np.concatenate(
        [
            np.geomspace(ETA_MIN, 0.5, 241),
            np.linspace(0.0, 1.0, 401)[1:-1],
            1.0 - np.geomspace(0.5, 1.0 - top, 241),
            shot.eta,
        ]
    )
    grid = grid[(grid >= ETA_MIN) & (grid <= top)]
    return np.unique(grid)


def _panel_integrals(fun, grid):
    """Cumulative integral over consecutive grid panels; stops at a failed panel."""
    cumulative = [0.0]
    for lo, hi in zip(grid[:-1], grid[1:]):
        try:
            piece = quad_adaptive(fun, lo, hi, tol=PANEL_TOL).value
        except NonConvergence as exc:
            logger.warning("Quadrature failed on [%.6g, %.6g]: %s", lo, hi, exc)
            break
        cumulative.append(cumulative[-1] + piece)
    return np.asarray(cumulative)


def front_edge(m, shot: ShotResult, eta0: float = 0.5) -> FrontEdge:
    """Decide whether xi(eta) stays bounded as eta -> 1.

    Increments of the integral over the decades x = 1000 delta, ..., delta of
    x = 1 - eta shrink geometrically for a sqrt tail and stay constant for a
    linear one. Finite when every ratio is at most 0.75, with the remainder
    summed as a geometric series; infinite when every ratio is at least 0.9.
    """
    if not is_admissible(shot):
        raise NotAdmissible(f"Speed {shot.speed:.10g} is not admissible", speed=shot.speed)
    fun = _integrand(m, shot)
    offsets = shot.delta * 10.0 ** np.arange(EDGE_DECADES, -1, -1)
    start = 1.0 - offsets[0]
    if start <= eta0:
        raise ValueError(f"Stop offset {shot.delta:g} too large for the edge test")

    base = quad_adaptive(fun, eta0, start, tol=PANEL_TOL).value
    increments = tuple(
        quad_adaptive(fun, 1.0 - wide, 1.0 - narrow, tol=PANEL_TOL).value
        for wide, narrow in zip(offsets[:-1], offsets[1:])
    )
    ratios = tuple(after / before for before, after in zip(increments[:-1], increments[1:]))

    if all(ratio <= FINITE_RATIO for ratio in ratios):
        r = ratios[-1]
        tau = base + sum(increments) + increments[-1] * r / (1.0 - r)
        return FrontEdge(True, float(tau), increments, ratios)
    if all(ratio >= INFINITE_RATIO for ratio in ratios):
        return FrontEdge(False, math.inf, increments, ratios)
    raise Indeterminate(
        f"Front-edge increments neither contract nor persist at c={shot.speed:.10g}: "
        f"ratios {', '.join(f'{r:.3f}' for r in ratios)}",
        ratios=list(ratios),
    )


def _sigma_matches_tau(shot, beta, partial):
    """beta reaches 0 where eta reaches 1, read off the end of the trajectory."""
    if partial:
        return False
    if not beta.size or beta[-1] > shot.A_thr:
        return False
    return bool(shot.eta_end >= 1.0 - shot.delta * (1.0 + 1e-9))


def reconstruct(m, shot: ShotResult, eta0: float = 0.5) -> WaveProfile:
    """Profile on the eta grid of ``shot`` with xi = 0 at eta = eta0."""
    if not is_admissible(shot):
        raise NotAdmissible(f"Speed {shot.speed:.10g} is not admissible", speed=shot.speed)
    if not ETA_MIN <= eta0 < shot.eta_end:
        raise ValueError(f"eta0={eta0!r} outside the shot range [{ETA_MIN}, {shot.eta_end}]")

    c = shot.speed
    fun = _integrand(m, shot)
    grid = _eta_grid(shot)
    cumulative = _panel_integrals(fun, grid)
    partial = cumulative.size < grid.size
    grid = grid[: cumulative.size]

    anchor = int(np.searchsorted(grid, eta0, side="right")) - 1
    anchor = min(max(anchor, 0), grid.size - 1)
    offset = cumulative[anchor] + quad_adaptive(fun, grid[anchor], eta0, tol=PANEL_TOL).value
    xi = cumulative - offset

    u = shot.u_at(grid)
    beta = 1.0 - grid + u
    with np.errstate(divide="ignore", invalid="ignore"):
        dbeta = -c * u / (m.g(grid) * m.h(beta))
    residual = first_integral_residual(m, c, grid, beta, dbeta)

    try:
        edge = front_edge(m, shot, eta0)
        tau = edge.tau_offset
        tau_status = edge.status
    except (Indeterminate, NonConvergence, ValueError) as exc:
        logger.warning("Front edge undetermined: %s", exc)
        tau, tau_status = math.nan, "indeterminate"

    profile = WaveProfile(
        speed=c,
        eta0=float(eta0),
        xi=xi,
        eta=grid,
        beta=beta,
        dbeta=dbeta,
        residual=residual,
        tau=tau,
        tau_status=tau_status,
        sigma_equals_tau=_sigma_matches_tau(shot, beta, partial),
        partial=partial,
        model=m,
    )
    if profile.barrier_min < 1.0 - BARRIER_TOL:
        logger.warning("eta + beta dips to %.12g below 1", profile.barrier_min)
    logger.debug(
        "Profile at c=%.10g: %d samples, xi in [%.4g, %.4g], tau %s",
        c,
        xi.size,
        xi[0],
        xi[-1],
        tau_status,
    )
    return profile


@dataclass(frozen=True)
class FirstIntegralReport:
    residual_sup: float
    residual_l2: float
    threshold: float
    worst_index: int
    fd_residual_sup: float = 0.0
    fd_threshold: float = math.inf
    fd_worst_xi: float = math.nan

    @property
    def fd_passed(self):
        return self.fd_residual_sup <= self.fd_threshold

    @property
    def passed(self):
        return self.residual_sup <= self.threshold and self.fd_passed

    def as_dict(self):
        return {
            "residual_sup": self.residual_sup,
            "residual_l2": self.residual_l2,
            "threshold": self.threshold,
            "worst_index": self.worst_index,
            "fd_residual_sup": self.fd_residual_sup,
            "fd_threshold": self.fd_threshold,
            "fd_worst_xi": self.fd_worst_xi,
            "fd_passed": self.fd_passed,
            "passed": self.passed,
        }


def _spaced_indices(xi, min_gap):
    """Greedy subset of sample indices at least ``min_gap`` apart in xi."""
    keep = [0]
    for index in range(1, xi.size):
        if xi[index] - xi[keep[-1]] >= min_gap:
            keep.append(index)
    return np.asarray(keep)


def finite_difference_residual(profile: WaveProfile):
    """First-integral residual with beta' taken from the sampled (xi, beta) pairs.

    Returns the interior xi positions and residuals of a thinned sample set;
    the stored dbeta column is not used.
    """
    finite = np.isfinite(profile.xi)
    xi, eta, beta = profile.xi[finite], profile.eta[finite], profile.beta[finite]
    if xi.size < 3:
        return np.empty(0), np.empty(0)
    index = _spaced_indices(xi, FD_MIN_GAP * float(xi[-1] - xi[0]))
    if index.size < 3:
        return np.empty(0), np.empty(0)
    xi, eta, beta = xi[index], eta[index], beta[index]
    slope = np.gradient(beta, xi)
    residual = first_integral_residual(profile.model, profile.speed, eta, beta, slope)
    return xi[1:-1], residual[1:-1]


def check_first_integral(
    profile: WaveProfile, tol: float = 1e-6, fd_tol: float = None
) -> FirstIntegralReport:
    """Recompute g h beta' + c beta + c eta - c on every sample.

    The stored dbeta is checked against the closed form, and a finite
    difference of beta along xi is checked against the same identity.
    """
    fd_tol = FD_TOL if fd_tol is None else fd_tol
    residual = first_integral_residual(
        profile.model, profile.speed, profile.eta, profile.beta, profile.dbeta
    )
    magnitude = np.abs(residual)
    worst = int(np.argmax(magnitude))
    fd_xi, fd_residual = finite_difference_residual(profile)
    fd_magnitude = np.abs(fd_residual)
    fd_worst = int(np.argmax(fd_magnitude)) if fd_magnitude.size else None
    report = FirstIntegralReport(
        residual_sup=float(magnitude[worst]),
        residual_l2=float(np.sqrt(np.mean(residual**2))),
        threshold=tol * max(1.0, profile.speed),
        worst_index=worst,
        fd_residual_sup=float(fd_magnitude[fd_worst]) if fd_worst is not None else 0.0,
        fd_threshold=fd_tol * max(1.0, profile.speed),
        fd_worst_xi=float(fd_xi[fd_worst]) if fd_worst is not None else math.nan,
    )
    if not report.fd_passed:
        logger.warning(
            "Finite-difference residual %.3e at xi=%.6g exceeds %.1e",
            report.fd_residual_sup,
            report.fd_worst_xi,
            report.fd_threshold,
        )
    return report


@dataclass(frozen=True)
class EnvelopeCheck:
    xi: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    max_violation: float

    @property
    def passed(self):
        return self.max_violation <= BARRIER_TOL

    def as_dict(self):
        return {"max_violation": self.max_violation, "passed": self.passed}


def gronwall_envelope(m, profile: WaveProfile) -> EnvelopeCheck:
    """eta0 e^{L2 xi / c} <= eta <= eta0 e^{L1 (1 - eta0) xi / c} for xi <= 0."""
    mask = profile.xi <= 0.0
    xi = profile.xi[mask]
    eta = profile.eta[mask]
    c, eta0 = profile.speed, profile.eta0
    lower = eta0 * np.exp(m.L2 * xi / c)
    upper = eta0 * np.exp(m.L1 * (1.0 - eta0) * xi / c)
    violation = np.maximum(lower - eta, eta - upper)
    worst = float(max(np.max(violation, initial=0.0), 0.0))
    return EnvelopeCheck(xi, lower, upper, worst)


def extend_past_edge(profile: WaveProfile, length: float, n: int = 50) -> WaveProfile:
    """Append the rest state (eta, beta) = (1, 0) on [tau, tau + length]."""
    if not profile.tau_finite:
        raise ValueError("Only profiles with a finite front edge can be extended")
    xi_tail = np.linspace(profile.tau, profile.tau + length, n)
    ones, zeros = np.ones(n), np.zeros(n)
    residual_tail = first_integral_residual(profile.model, profile.speed, ones, zeros, zeros)
    return replace(
        profile,
        xi=np.concatenate([profile.xi, xi_tail]),
        eta=np.concatenate([profile.eta, ones]),
        beta=np.concatenate([profile.beta, zeros]),
        dbeta=np.concatenate([profile.dbeta, zeros]),
        residual=np.concatenate([profile.residual, residual_tail]),
    )


def resample_uniform(profile: WaveProfile, n: int = 1000, xi_range: Optional[tuple] = None):
    """Linear resampling on a uniform xi grid, for tables and figures."""
    lo, hi = xi_range or (float(profile.xi[0]), float(profile.xi[-1]))
    xi = np.linspace(lo, hi, n)
    eta = np.interp(xi, profile.xi, profile.eta)
    beta = np.interp(xi, profile.xi, profile.beta)
    dbeta = np.interp(xi, profile.xi, profile.dbeta)
    residual = np.interp(xi, profile.xi, profile.residual)
    return replace(profile, xi=xi, eta=eta, beta=beta, dbeta=dbeta, residual=residual)

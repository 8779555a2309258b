"""
Shooting on the reduced problem for B_c(eta).

Writing the wave profile as beta = B(eta) turns the travelling-wave system
into the scalar singular problem

    B'(eta) = c^2 (1 - eta - B) / (g(eta) h(B) f(eta, B)),   B(0) = 1,

whose solution reaches B(1) = 0 exactly when c is an admissible speed. The
right side is 0/0 at (0, 1), so the integration starts at eta = eps from the
second-order series and stops at eta = 1 - delta before the degenerate corner.

The integrated variable is the deviation u = B - (1 - eta) >= 0, which obeys
u' = 1 - c^2 u / (g h f) and avoids the cancellation in 1 - eta - B.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from django.db import models
from joblib import Parallel, delayed
from sklearn.linear_model import LinearRegression

from numerics.conf import get_setting
from numerics.integrate import EventSpec, IntegratorConfig, Trajectory, integrate_ivp

from .exceptions import Inconclusive, NotAdmissible, NotShootable, SingularLaunch

logger = logging.getLogger(__name__)

# Allowed crossing of the diagonal B = 1 - eta
DRIFT_TOL = 1e-9
MAX_OFFSET = 1e-4
# Floor for B inside the right side, keeps h(B) f(eta, B) away from 0
B_CLAMP = 1e-300
TAIL_DECADES = 2
TAIL_POINTS = 41
ORDERING_TOL = 1e-8

SHARP_EXPONENT = (0.35, 0.65)
CLASSICAL_EXPONENT = (0.85, 1.15)
SHARP_AMPLITUDE_RTOL = 0.25
# Launch tolerance tracks u0 but never drops below this
LAUNCH_ATOL_FLOOR = 1e-14
# Smallest step, as a multiple of the squared launch or stop offset
MIN_STEP_PER_OFFSET = 1e-3


class Regime(models.TextChoices):
    NON_ADMISSIBLE = "non_admissible", "Non-admissible"
    SHARP_CANDIDATE = "sharp_candidate", "Sharp candidate"
    SHARP = "sharp", "Sharp"
    CLASSICAL = "classical", "Classical"
    INDETERMINATE = "indeterminate", "Indeterminate"
    INCONCLUSIVE = "inconclusive", "Inconclusive"


@dataclass(frozen=True)
class TailFit:
    """Least-squares fit of B ~ A (1 - eta)**p in log-log coordinates."""

    exponent: float
    amplitude: float
    exponent_stderr: float
    n_points: int
    x_min: float
    x_max: float

    def as_dict(self):
        return {
            "exponent": self.exponent,
            "amplitude": self.amplitude,
            "exponent_stderr": self.exponent_stderr,
            "n_points": self.n_points,
            "x_min": self.x_min,
            "x_max": self.x_max,
        }


def fit_tail(x, B) -> Optional[TailFit]:
    """Fit ``log B = log A + p log x``; None when fewer than 3 usable points."""
    x = np.asarray(x, dtype=float)
    B = np.asarray(B, dtype=float)
    mask = (x > 0.0) & (B > 0.0) & np.isfinite(x) & np.isfinite(B)
    if np.count_nonzero(mask) < 3:
        return None
    log_x = np.log(x[mask]).reshape(-1, 1)
    log_b = np.log(B[mask])
    model = LinearRegression().fit(log_x, log_b)
    residuals = log_b - model.predict(log_x)
    n = log_b.size
    spread = float(np.sum((log_x[:, 0] - log_x[:, 0].mean()) ** 2))
    variance = float(residuals @ residuals) / max(n - 2, 1)
    stderr = math.sqrt(variance / spread) if spread > 0.0 else math.nan
    return TailFit(
        exponent=float(model.coef_[0]),
        amplitude=float(math.exp(model.intercept_)),
        exponent_stderr=stderr,
        n_points=int(n),
        x_min=float(x[mask].min()),
        x_max=float(x[mask].max()),
    )


def tail_window(delta):
    """Offsets x = 1 - eta from 100 delta down to delta."""
    return np.geomspace(10.0**TAIL_DECADES * delta, delta, TAIL_POINTS)


def admissibility_threshold(m, c, delta):
    return 2.0 * m.sharp_amplitude(c) * math.sqrt(delta) + delta


def regime_from_tail(m, c, tail: Optional[TailFit]) -> Regime:
    if tail is None:
        return Regime.INDETERMINATE
    p, amplitude = tail.exponent, tail.amplitude
    if SHARP_EXPONENT[0] <= p <= SHARP_EXPONENT[1]:
        if abs(amplitude / m.sharp_amplitude(c) - 1.0) <= SHARP_AMPLITUDE_RTOL:
            return Regime.SHARP
        return Regime.INDETERMINATE
    if CLASSICAL_EXPONENT[0] <= p <= CLASSICAL_EXPONENT[1]:
        return Regime.CLASSICAL
    return Regime.INDETERMINATE


@dataclass
class ShotResult:
    speed: float
    eps: float
    delta: float
    eta: np.ndarray
    B: np.ndarray
    B_end: float
    eta_end: float
    A_thr: float
    launch_curvature: float
    tail: Optional[TailFit]
    admissible: Optional[bool]
    regime: str
    terminated_by: Optional[str] = None
    n_steps: int = 0
    # min over the run of B - (1 - eta)
    min_gap: float = 0.0
    config: dict = field(default_factory=dict)
    trajectory: Optional[Trajectory] = field(default=None, repr=False, compare=False)

    def u_at(self, eta):
        """Deviation B - (1 - eta): launch series below eps, dense output above."""
        eta = np.asarray(eta, dtype=float)
        clipped = np.clip(eta, self.eps, self.eta_end)
        if self.trajectory is not None:
            values = np.asarray(self.trajectory(clipped), dtype=float)[0]
        else:
            values = np.interp(clipped, self.eta, self.B - (1.0 - self.eta))
        return np.where(eta < self.eps, self.launch_curvature * eta**2, values)

    def B_at(self, eta):
        eta = np.asarray(eta, dtype=float)
        return 1.0 - eta + self.u_at(eta)

    def frame(self):
        return pd.DataFrame({"eta": self.eta, "B": self.B})

    def as_dict(self):
        return {
            "speed": self.speed,
            "eps": self.eps,
            "delta": self.delta,
            "B_end": self.B_end,
            "eta_end": self.eta_end,
            "A_thr": self.A_thr,
            "launch_curvature": self.launch_curvature,
            "tail": self.tail.as_dict() if self.tail else None,
            "admissible": self.admissible,
            "regime": str(self.regime),
            "terminated_by": self.terminated_by,
            "n_steps": self.n_steps,
            "min_gap": self.min_gap,
            "config": dict(self.config),
        }


def _classify_end(B_end, A_thr, terminated_by):
    if terminated_by == "floor" or B_end <= A_thr:
        return True
    if B_end <= 2.0 * A_thr:
        return None
    return False


def shoot(
    m,
    c: float,
    eps: Optional[float] = None,
    delta: Optional[float] = None,
    config: Optional[IntegratorConfig] = None,
) -> ShotResult:
    """Integrate B_c from eta = eps to eta = 1 - delta.

    Events stop the run when B drops through the diagonal 1 - eta (a
    numerical breach) or through the floor delta**2.
    """
    if not m.shootable:
        raise NotShootable(
            f"{m.family_tag} has no finite positive corner derivatives; only bounds are available"
        )
    if not c > 0:
        raise ValueError(f"Speed must be positive, got {c!r}")
    eps = get_setting("EPS") if eps is None else float(eps)
    delta = get_setting("DELTA") if delta is None else float(delta)
    if not 0.0 < eps <= MAX_OFFSET or not 0.0 < delta <= MAX_OFFSET:
        raise ValueError(f"eps and delta must lie in (0, {MAX_OFFSET:g}]")

    c = float(c)
    kappa = m.launch_curvature(c)
    u0 = kappa * eps**2
    launch = 1.0 - eps + u0
    if not (1.0 - eps < launch < 1.0):
        raise SingularLaunch(
            f"Launch series gives B({eps:g}) = {launch!r} outside (1 - eps, 1); shrink eps",
            eps=eps,
            launch_value=launch,
        )

    base = config or IntegratorConfig.from_settings(method=get_setting("SHOOT_METHOD"))
    config = replace(
        base,
        abs_tol=max(min(base.abs_tol, 1e-3 * u0), LAUNCH_ATOL_FLOOR),
        min_step=min(base.min_step, MIN_STEP_PER_OFFSET * min(eps, delta) ** 2),
    )
    c2 = c * c

    def rhs(eta, y):
        u = y[0]
        B = max(1.0 - eta + u, B_CLAMP)
        return [1.0 - c2 * u / float(m.g(eta) * m.h(B) * m.f(eta, B))]

    floor = delta**2
    events = (
        EventSpec(lambda eta, y: y[0] + DRIFT_TOL, "falling", True, "diagonal"),
        EventSpec(lambda eta, y: 1.0 - eta + y[0] - floor, "falling", True, "floor"),
    )
    trajectory = integrate_ivp(rhs, eps, 1.0 - delta, [u0], config, events)

    eta = trajectory.t
    u = trajectory.y[0]
    B = 1.0 - eta + u
    terminated_by = trajectory.events[-1].name if trajectory.terminated else None
    if terminated_by == "diagonal":
        logger.warning("Shot at c=%.10g crossed the diagonal at eta=%.6g", c, trajectory.t_end)
    if np.any(np.diff(B) > DRIFT_TOL):
        logger.warning("Shot at c=%.10g is not monotone", c)

    A_thr = admissibility_threshold(m, c, delta)
    result = ShotResult(
        speed=c,
        eps=eps,
        delta=delta,
        eta=eta,
        B=B,
        B_end=float(B[-1]),
        eta_end=float(eta[-1]),
        A_thr=A_thr,
        launch_curvature=kappa,
        tail=None,
        admissible=None,
        regime=Regime.INCONCLUSIVE,
        terminated_by=terminated_by,
        n_steps=trajectory.n_steps,
        min_gap=float(np.min(u)),
        config=config.as_dict(),
        trajectory=trajectory,
    )

    x = tail_window(delta)
    x = x[(1.0 - x <= result.eta_end) & (1.0 - x >= eps)]
    result.tail = fit_tail(x, result.B_at(1.0 - x))
    result.admissible = _classify_end(result.B_end, A_thr, terminated_by)
    if result.admissible is False:
        result.regime = Regime.NON_ADMISSIBLE
    elif result.admissible:
        regime = regime_from_tail(m, c, result.tail)
        result.regime = Regime.SHARP_CANDIDATE if regime == Regime.SHARP else regime

    logger.debug(
        "shot c=%.10g delta=%.1e B_end=%.6e A_thr=%.6e admissible=%s steps=%d",
        c,
        delta,
        result.B_end,
        A_thr,
        result.admissible,
        result.n_steps,
    )
    return result


def is_admissible(shot: ShotResult) -> bool:
    """B_end at or below the sharp-amplitude threshold means B reaches 0."""
    value = _classify_end(shot.B_end, shot.A_thr, shot.terminated_by)
    if value is None:
        raise Inconclusive(
            f"B_end={shot.B_end:.6e} lies in [A_thr, 2 A_thr] with A_thr={shot.A_thr:.6e} "
            f"at c={shot.speed:.10g}; shrink delta",
            speed=shot.speed,
            B_end=shot.B_end,
            A_thr=shot.A_thr,
            delta=shot.delta,
        )
    return value


def classify_regime(m, c: float, c0: float, shot: ShotResult) -> Regime:
    """Sharp, classical or indeterminate from the tail exponent and amplitude."""
    if not is_admissible(shot):
        raise NotAdmissible(f"Speed {c:.10g} is not admissible", speed=c)
    regime = regime_from_tail(m, c, shot.tail)
    if regime == Regime.INDETERMINATE:
        logger.warning(
            "Indeterminate regime at c=%.10g (c - c0 = %.3e): tail %s",
            c,
            c - c0,
            shot.tail.as_dict() if shot.tail else None,
        )
    return regime


def is_monotone_predicate(values: Sequence[bool]) -> bool:
    """True for false...false, true...true."""
    seen_true = False
    for value in values:
        if value:
            seen_true = True
        elif seen_true:
            return False
    return True


@dataclass(frozen=True)
class OrderingCheck:
    passed: bool
    worst_violation: float
    at_eta: Optional[float]
    speeds: tuple
    predicate_monotone: bool

    def as_dict(self):
        return {
            "passed": self.passed,
            "worst_violation": self.worst_violation,
            "at_eta": self.at_eta,
            "speeds": list(self.speeds),
            "predicate_monotone": self.predicate_monotone,
        }


def shared_grid(shots: Sequence[ShotResult], n: int = 2001):
    lo = max(shot.eps for shot in shots)
    hi = min(shot.eta_end for shot in shots)
    half = n // 2
    grid = np.concatenate(
        [np.geomspace(lo, 0.5, half), 1.0 - np.geomspace(0.5, 1.0 - hi, n - half)]
    )
    return np.unique(np.clip(grid, lo, hi))


def check_ordering(shots: Sequence[ShotResult], tol: float = ORDERING_TOL) -> OrderingCheck:
    """Lower speeds must give larger B: B_c1 >= B_c2 - tol for c1 < c2."""
    ordered = sorted(shots, key=lambda shot: shot.speed)
    predicate = [shot.admissible for shot in ordered if shot.admissible is not None]
    worst, at = 0.0, None
    if len(ordered) > 1:
        grid = shared_grid(ordered)
        values = [shot.B_at(grid) for shot in ordered]
        for slower, faster in zip(values[:-1], values[1:]):
            gap = faster - slower
            index = int(np.argmax(gap))
            if gap[index] > worst:
                worst, at = float(gap[index]), float(grid[index])
    return OrderingCheck(
        passed=worst <= tol,
        worst_violation=worst,
        at_eta=at,
        speeds=tuple(shot.speed for shot in ordered),
        predicate_monotone=is_monotone_predicate(predicate),
    )


def sweep_speeds(
    m,
    speeds: Sequence[float],
    eps: Optional[float] = None,
    delta: Optional[float] = None,
    config: Optional[IntegratorConfig] = None,
    n_jobs: int = 1,
) -> List[ShotResult]:
    """Shoot every speed; results come back in input order."""
    speeds = [float(c) for c in speeds]
    if not speeds:
        return []
    return list(
        Parallel(n_jobs=n_jobs)(delayed(shoot)(m, c, eps, delta, config) for c in speeds)
    )

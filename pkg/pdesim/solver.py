"""
Explicit finite-volume integration of

    n_t = -f(n, b),   b_t = [g(n) h(b) b_x]_x + f(n, b)

on [0, length] with zero-flux boundaries, and front-speed measurement from
the b = 1/2 level set. The reaction terms cancel in n + b, so the total
mass only moves through the boundary, which is closed here.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
import pandas as pd
from sklearn.linear_model import LinearRegression

from modelspec.audit import require_audited
from numerics.conf import get_setting

from .exceptions import CflViolation, FrontLost, NonFiniteState

logger = logging.getLogger(__name__)

FACE_RULES = ("arithmetic", "upwind")
INITIAL_KINDS = ("step", "zero")
CLIP_TOL = 1e-10
STABILITY_LIMIT = 0.5
LEVEL = 0.5
TRANSIENT_FRACTION = 0.25
MIN_SAMPLES = 20


@dataclass(frozen=True)
class InitialData:
    kind: str = "step"
    step_at: float = 20.0
    width: float = 1.0

    def __post_init__(self):
        if self.kind not in INITIAL_KINDS:
            raise ValueError(f"kind must be one of {INITIAL_KINDS}")
        if not self.width > 0:
            raise ValueError("width must be positive")

    def build(self, x):
        n = np.ones_like(x)
        if self.kind == "zero":
            return n, np.zeros_like(x)
        # b = 1 left of step_at, smoothed over ``width``; n + b = 1 so the
        # colonised region starts exhausted
        b = 0.5 * (1.0 - np.tanh((x - self.step_at) / self.width))
        return n - b, b


@dataclass(frozen=True)
class PdeConfig:
    length: float = 400.0
    cells: int = 4000
    end_time: float = 300.0
    cfl: float = 0.4
    output_every: float = 1.0
    initial: InitialData = field(default_factory=InitialData)
    face_rule: str = "arithmetic"
    reaction_enabled: bool = True
    max_halvings: int = 20

    def __post_init__(self):
        if self.cells < 100:
            raise ValueError("cells must be at least 100")
        if not (self.length > 0 and self.end_time > 0 and self.output_every > 0):
            raise ValueError("length, end_time and output_every must be positive")
        if self.dx > 0.5:
            raise ValueError(f"Cell size {self.dx:g} does not resolve the front (max 0.5)")
        if not 0 < self.cfl <= 1:
            raise ValueError("cfl must lie in (0, 1]")
        if self.face_rule not in FACE_RULES:
            raise ValueError(f"face_rule must be one of {FACE_RULES}")

    @property
    def dx(self):
        return self.length / self.cells

    @classmethod
    def from_settings(cls, **overrides):
        values = dict(get_setting("PDE") or {})
        initial = InitialData(
            kind=overrides.pop("initial_kind", values.pop("initial_kind", "step")),
            step_at=float(overrides.pop("step_at", values.pop("step_at", 20.0))),
            width=float(overrides.pop("step_width", values.pop("step_width", 1.0))),
        )
        values.update({key: value for key, value in overrides.items() if value is not None})
        values.setdefault("initial", initial)
        return cls(**values)

    def as_dict(self):
        return asdict(self)


@dataclass
class PdeRun:
    config: PdeConfig
    times: np.ndarray
    fronts: np.ndarray
    mass: np.ndarray = field(default_factory=lambda: np.zeros(0))
    max_step_drift: float = 0.0
    clip_count: int = 0
    steps: int = 0
    halvings: int = 0
    x: Optional[np.ndarray] = field(default=None, repr=False)
    n: Optional[np.ndarray] = field(default=None, repr=False)
    b: Optional[np.ndarray] = field(default=None, repr=False)
    speed: Optional[float] = None
    stderr: Optional[float] = None

    @property
    def mass_drift_rate(self):
        """Largest |d mass / dt| between outputs."""
        if self.mass.size < 2:
            return 0.0
        return float(np.max(np.abs(np.diff(self.mass) / np.diff(self.times))))

    @property
    def front_monotone(self):
        cutoff = TRANSIENT_FRACTION * self.config.end_time
        fronts = self.fronts[(self.times >= cutoff) & np.isfinite(self.fronts)]
        return bool(np.all(np.diff(fronts) >= -self.config.dx * 1e-6))

    def frame(self):
        return pd.DataFrame({"t": self.times, "front": self.fronts, "mass": self.mass})

    def as_dict(self):
        return {
            "config": self.config.as_dict(),
            "speed": self.speed,
            "stderr": self.stderr,
            "samples": int(self.times.size),
            "steps": self.steps,
            "halvings": self.halvings,
            "clip_count": self.clip_count,
            "max_step_drift": self.max_step_drift,
            "mass_drift_rate": self.mass_drift_rate,
            "front_monotone": self.front_monotone,
        }


def front_position(x, b, level=LEVEL):
    """Rightmost crossing of ``level`` by linear interpolation, NaN when lost."""
    above = np.flatnonzero(b >= level)
    if above.size == 0:
        return math.nan
    i = int(above[-1])
    if i >= b.size - 1:
        return math.nan
    left, right = b[i], b[i + 1]
    return float(x[i] + (left - level) / (left - right) * (x[i + 1] - x[i]))


def face_diffusivity(D, b, rule):
    if rule == "upwind":
        return np.where(b[:-1] >= b[1:], D[:-1], D[1:])
    return 0.5 * (D[:-1] + D[1:])


def _tendencies(m, n, b, dx, config):
    D = m.g(n) * m.h(b)
    flux = face_diffusivity(D, b, config.face_rule) * (b[1:] - b[:-1]) / dx
    divergence = np.zeros_like(b)
    divergence[:-1] += flux
    divergence[1:] -= flux
    divergence /= dx
    if config.reaction_enabled:
        reaction = m.f(n, b)
    else:
        reaction = np.zeros_like(b)
    return -reaction, divergence + reaction, float(np.max(D))


def run_pde(m, cfg: Optional[PdeConfig] = None) -> PdeRun:
    """Integrate to ``cfg.end_time`` recording the front every ``output_every``."""
    require_audited(m)
    cfg = cfg or PdeConfig.from_settings()
    dx = cfg.dx
    x = (np.arange(cfg.cells) + 0.5) * dx
    n, b = cfg.initial.build(x)
    reaction_dt = 1.0 / (4.0 * m.L2)

    outputs = np.arange(0.0, cfg.end_time + 0.5 * cfg.output_every, cfg.output_every)
    times = [0.0]
    fronts = [front_position(x, b)]
    mass = [float(np.sum(n + b) * dx)]
    t = 0.0
    steps = halvings = clip_count = 0
    max_drift = 0.0
    dn, db, d_max = _tendencies(m, n, b, dx, cfg)

    for target in outputs[1:]:
        while t < target - 1e-12:
            diffusive_dt = dx * dx / (2.0 * d_max) if d_max > 0 else math.inf
            dt = min(cfg.cfl * min(diffusive_dt, reaction_dt), target - t)
            for attempt in range(cfg.max_halvings + 1):
                n_new = n + dt * dn
                b_new = b + dt * db
                if not (np.all(np.isfinite(n_new)) and np.all(np.isfinite(b_new))):
                    raise NonFiniteState(f"Non-finite PDE state at t={t:.6g}", t=t)
                new_dn, new_db, new_max = _tendencies(m, n_new, b_new, dx, cfg)
                if new_max * dt / (dx * dx) <= STABILITY_LIMIT:
                    break
                dt *= 0.5
                halvings += 1
            else:
                raise CflViolation(
                    f"Step rejected {cfg.max_halvings} times at t={t:.6g}", t=t, dt=dt
                )

            outside = (
                np.count_nonzero((n_new < -CLIP_TOL) | (n_new > 1.0 + CLIP_TOL))
                + np.count_nonzero((b_new < -CLIP_TOL) | (b_new > 1.0 + CLIP_TOL))
            )
            if outside or np.any(n_new < 0) or np.any(b_new < 0) or np.any(b_new > 1):
                clip_count += int(outside)
                n_new = np.clip(n_new, 0.0, 1.0)
                b_new = np.clip(b_new, 0.0, 1.0)
                new_dn, new_db, new_max = _tendencies(m, n_new, b_new, dx, cfg)

            drift = abs(float(np.sum(n_new + b_new - n - b)) * dx)
            max_drift = max(max_drift, drift)
            n, b = n_new, b_new
            dn, db, d_max = new_dn, new_db, new_max
            t += dt
            steps += 1
        times.append(t)
        fronts.append(front_position(x, b))
        mass.append(float(np.sum(n + b) * dx))

    run = PdeRun(
        config=cfg,
        times=np.asarray(times),
        fronts=np.asarray(fronts),
        mass=np.asarray(mass),
        max_step_drift=max_drift,
        clip_count=clip_count,
        steps=steps,
        halvings=halvings,
        x=x,
        n=n,
        b=b,
    )
    try:
        run.speed, run.stderr = measure_speed(run)
    except FrontLost as exc:
        logger.warning("No front speed for this run: %s", exc)
    logger.info(
        "PDE run finished: %d steps, speed=%s, clipped=%d",
        steps,
        f"{run.speed:.6g}" if run.speed is not None else "n/a",
        clip_count,
    )
    return run


def measure_speed(run: PdeRun, transient: float = TRANSIENT_FRACTION):
    """Least-squares slope of the front position after the transient."""
    cutoff = transient * run.config.end_time
    window = run.times >= cutoff
    fronts = run.fronts[window]
    times = run.times[window]
    if fronts.size and not np.all(np.isfinite(fronts)):
        raise FrontLost(f"Front left the domain or vanished after t={cutoff:g}")
    if fronts.size < MIN_SAMPLES:
        raise FrontLost(f"Only {fronts.size} front samples after t={cutoff:g}")

    X = times.reshape(-1, 1)
    model = LinearRegression().fit(X, fronts)
    residuals = fronts - model.predict(X)
    spread = float(np.sum((times - times.mean()) ** 2))
    variance = float(residuals @ residuals) / max(fronts.size - 2, 1)
    return float(model.coef_[0]), math.sqrt(variance / spread)

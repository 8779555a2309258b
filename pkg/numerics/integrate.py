"""
Adaptive explicit integration with dense output and event detection.

``integrate_ivp`` drives a scipy ``OdeSolver`` step by step so that step
counting, the minimum-step guard and event location stay under our control.
Events are located by bisection on the dense output of the step in which the
event function changes sign.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy import integrate, optimize

from .conf import get_setting
from .exceptions import MaxStepsExceeded, NonFiniteState, StepSizeUnderflow

logger = logging.getLogger(__name__)

SOLVERS = {
    "DOP853": integrate.DOP853,
    "RK45": integrate.RK45,
    "LSODA": integrate.LSODA,
}

# Absolute accuracy of located event times
EVENT_XTOL = 1e-12

DIRECTIONS = ("any", "falling", "rising")


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_steps: int = 2_000_000
    # Fraction of the integration interval
    min_step: float = 1e-14
    method: str = "DOP853"

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_steps", "min_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.method not in SOLVERS:
            raise ValueError(
                f"Unknown method {self.method!r}; choose one of {sorted(SOLVERS)}"
            )

    @classmethod
    def from_settings(cls, method=None, **overrides):
        values = {
            "rel_tol": get_setting("RTOL"),
            "abs_tol": get_setting("ATOL"),
            "max_steps": int(get_setting("MAX_STEPS")),
            "min_step": get_setting("MIN_STEP"),
            "method": method or "DOP853",
        }
        values.update(overrides)
        return cls(**values)

    def as_dict(self):
        return {
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "max_steps": self.max_steps,
            "min_step": self.min_step,
            "method": self.method,
        }


@dataclass(frozen=True)
class EventSpec:
    fun: Callable[[float, np.ndarray], float]
    direction: str = "any"
    terminal: bool = False
    name: str = ""

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}")

    def crossed(self, before, after):
        if self.direction == "rising":
            return before < 0.0 <= after
        if self.direction == "falling":
            return before > 0.0 >= after
        return (before < 0.0 <= after) or (before > 0.0 >= after)


@dataclass(frozen=True)
class EventHit:
    name: str
    index: int
    t: float
    y: np.ndarray


@dataclass
class Trajectory:
    """Accepted step points plus a dense interpolant over the whole run."""

    t: np.ndarray
    y: np.ndarray
    sol: integrate.OdeSolution
    events: List[EventHit] = field(default_factory=list)
    terminated: bool = False
    n_steps: int = 0
    nfev: int = 0

    def __call__(self, t):
        return self.sol(t)

    @property
    def t_end(self):
        return float(self.t[-1])

    @property
    def y_end(self):
        return self.y[:, -1]

    def hits(self, name):
        return [hit for hit in self.events if hit.name == name]


def _locate(event, dense, t_old, t_new):
    def on_dense(t):
        return float(event.fun(t, dense(t)))

    left, right = on_dense(t_old), on_dense(t_new)
    if left * right > 0.0:
        # Sign change only visible on the step endpoints, not on the interpolant
        return t_new
    return optimize.bisect(on_dense, t_old, t_new, xtol=EVENT_XTOL)


def integrate_ivp(
    rhs,
    t0: float,
    t1: float,
    y0,
    config: Optional[IntegratorConfig] = None,
    events: Sequence[EventSpec] = (),
) -> Trajectory:
    """Integrate ``y' = rhs(t, y)`` from ``t0`` to ``t1``.

    Raises StepSizeUnderflow when the step collapses below
    ``config.min_step * |t1 - t0|`` or the solver gives up, and
    MaxStepsExceeded when ``config.max_steps`` accepted steps are not enough.
    """
    config = config or IntegratorConfig.from_settings()
    if t1 == t0:
        raise ValueError("Integration interval is empty")
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    span = abs(t1 - t0)
    sign = 1.0 if t1 > t0 else -1.0

    options = {"rtol": config.rel_tol, "atol": config.abs_tol}
    if config.method == "LSODA":
        options["min_step"] = config.min_step * span
    solver = SOLVERS[config.method](rhs, t0, y0, t1, **options)

    ts = [float(t0)]
    ys = [y0.copy()]
    interpolants = []
    hits = []
    previous = [float(event.fun(t0, y0)) for event in events]
    terminated = False

    while solver.status == "running":
        if len(interpolants) >= config.max_steps:
            raise MaxStepsExceeded(
                f"{config.max_steps} steps taken without reaching t={t1}", t=solver.t
            )
        message = solver.step()
        if solver.status == "failed":
            raise StepSizeUnderflow(
                f"Integrator failed at t={solver.t!r}: {message}", t=solver.t
            )
        if not np.all(np.isfinite(solver.y)):
            raise NonFiniteState(f"Non-finite state at t={solver.t!r}", t=solver.t)

        t_old, t_new = solver.t_old, solver.t
        if solver.status == "running" and abs(t_new - t_old) < config.min_step * span:
            raise StepSizeUnderflow(
                f"Step {abs(t_new - t_old):.3e} below minimum at t={t_new!r}", t=t_new
            )
        dense = solver.dense_output()

        stop = None
        step_hits = []
        for index, event in enumerate(events):
            current = float(event.fun(t_new, solver.y))
            if event.crossed(previous[index], current):
                root = _locate(event, dense, t_old, t_new)
                step_hits.append(
                    EventHit(event.name or str(index), index, root, dense(root))
                )
                if event.terminal and (stop is None or sign * (root - stop) < 0.0):
                    stop = root
            previous[index] = current

        interpolants.append(dense)
        if stop is not None:
            hits.extend(hit for hit in step_hits if sign * (hit.t - stop) <= 0.0)
            if sign * (stop - ts[-1]) > 0.0:
                ts.append(stop)
                ys.append(np.asarray(dense(stop), dtype=float))
            elif len(interpolants) > 1:
                # Event sits on the previous step point
                interpolants.pop()
            else:
                ts.append(ts[-1] + sign * EVENT_XTOL)
                ys.append(np.asarray(dense(ts[-1]), dtype=float))
            terminated = True
            logger.debug("Terminal event at t=%r after %d steps", stop, len(interpolants))
            break
        hits.extend(step_hits)
        ts.append(float(t_new))
        ys.append(solver.y.copy())

    return Trajectory(
        t=np.asarray(ts),
        y=np.column_stack(ys),
        sol=integrate.OdeSolution(ts, interpolants),
        events=hits,
        terminated=terminated,
        n_steps=len(interpolants),
        nfev=solver.nfev,
    )

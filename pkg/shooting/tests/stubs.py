import numpy as np

from shooting.shots import Regime, ShotResult

A_THR = 1e-3


def make_shot(c, delta, outcome):
    """Shot stub whose end value lands below, inside or above the admissibility band."""
    B_end = {"admissible": 0.1 * A_THR, "inconclusive": 1.5 * A_THR, "blocked": 0.5}[outcome]
    return ShotResult(
        speed=c,
        eps=1e-6,
        delta=delta,
        eta=np.array([1e-6, 1.0 - delta]),
        B=np.array([1.0, B_end]),
        B_end=B_end,
        eta_end=1.0 - delta,
        A_thr=A_THR,
        launch_curvature=1.0 / c**2,
        tail=None,
        admissible={"admissible": True, "inconclusive": None, "blocked": False}[outcome],
        regime=Regime.INCONCLUSIVE,
    )

import math
from dataclasses import replace

import numpy as np
import pytest

from bounds.estimates import SpeedBounds
from modelspec.specs import build_power_law
from numerics.exceptions import BadBracket
from shooting.exceptions import Inconclusive, NotAdmissible, NotShootable, SingularLaunch
from shooting.shots import (
    LAUNCH_ATOL_FLOOR,
    MIN_STEP_PER_OFFSET,
    Regime,
    check_ordering,
    classify_regime,
    is_admissible,
    shoot,
    sweep_speeds,
)
from shooting.threshold import (
    MAX_REFINEMENTS,
    AdmissibilityPredicate,
    conjecture_gap,
    find_threshold,
    refine_threshold,
    threshold_shot,
)

REFERENCE_BOUNDS = SpeedBounds(math.sqrt(1 / 12), math.sqrt(1 / 15), math.sqrt(1 / 12), 2.0)


@pytest.mark.module
class TestShoot:
    @pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
    def test_launch_series(self, smga, c):
        eps = 1e-5
        shot = shoot(smga, c, eps=eps)
        assert shot.launch_curvature == pytest.approx(1.0 / c**2)
        measured = float(shot.u_at(2.0 * eps)) / (2.0 * eps) ** 2
        assert measured == pytest.approx(1.0 / c**2, rel=1e-2)

    def test_launch_slope(self, smga):
        eps = 1e-5
        shot = shoot(smga, 1.0, eps=eps)
        slope = (float(shot.B_at(2.0 * eps)) - float(shot.B_at(eps))) / eps
        assert slope == pytest.approx(-1.0, abs=1e-3)

    def test_slow_speed_not_admissible(self, smga):
        shot = shoot(smga, 0.2)
        assert shot.admissible is False
        assert shot.regime == Regime.NON_ADMISSIBLE
        assert shot.B_end > 2.0 * shot.A_thr
        assert not is_admissible(shot)

    def test_fast_speed_classical(self, smga):
        shot = shoot(smga, 2.5)
        assert shot.admissible is True
        assert shot.eta_end == pytest.approx(1.0 - 1e-6)
        assert shot.regime == Regime.CLASSICAL
        assert 0.85 <= shot.tail.exponent <= 1.15

    def test_trajectory_stays_above_diagonal(self, smga):
        shot = shoot(smga, 1.0)
        assert np.all(shot.B >= 1.0 - shot.eta - 1e-9)
        assert np.all(np.diff(shot.B) <= 1e-9)
        assert np.all((shot.B > 0.0) & (shot.B <= 1.0))

    def test_frame_columns(self, smga):
        frame = shoot(smga, 2.5).frame()
        assert list(frame.columns) == ["eta", "B"]

    @pytest.mark.parametrize("eps", [1e-6, 1e-5])
    def test_small_launch_offset_keeps_tolerance_floor(self, smga, eps):
        shot = shoot(smga, 2.5, eps=eps)
        assert shot.config.abs_tol >= LAUNCH_ATOL_FLOOR
        assert shot.admissible is True
        assert shot.regime == Regime.CLASSICAL

    def test_default_offsets_near_threshold(self, smga):
        shot = shoot(smga, 0.75)
        assert shot.eps == 1e-6
        assert shot.config.abs_tol == LAUNCH_ATOL_FLOOR
        assert shot.n_steps > 0

    def test_min_step_follows_floor_offset(self, smga):
        delta = 1e-8
        shot = shoot(smga, 2.5, delta=delta)
        assert shot.config.min_step <= MIN_STEP_PER_OFFSET * delta**2
        assert shot.eta_end == pytest.approx(1.0 - delta)
        assert shot.admissible is True

    def test_min_step_at_admissible_side_of_bracket(self, smga):
        shot = shoot(smga, 0.706, delta=1e-8)
        assert shot.terminated_by in (None, "floor", "diagonal")
        assert shot.n_steps > 0

    def test_bounds_only_model(self):
        with pytest.raises(NotShootable):
            shoot(build_power_law(3, 1, bounds_only=True), 1.0)

    def test_invalid_arguments(self, smga):
        with pytest.raises(ValueError):
            shoot(smga, 0.0)
        with pytest.raises(ValueError):
            shoot(smga, 1.0, delta=1e-2)

    def test_singular_launch(self, smga):
        with pytest.raises(SingularLaunch):
            shoot(smga, 0.005, eps=1e-4)

    def test_classify_rejects_blocked_speed(self, smga):
        shot = shoot(smga, 0.2)
        with pytest.raises(NotAdmissible):
            classify_regime(smga, 0.2, 0.7, shot)


@pytest.mark.module
class TestOrdering:
    def test_slower_speeds_lie_above(self, smga):
        shots = sweep_speeds(smga, [0.4, 0.8, 1.2])
        assert [shot.speed for shot in shots] == [0.4, 0.8, 1.2]
        check = check_ordering(shots)
        assert check.passed
        assert check.predicate_monotone

    def test_order_independent_of_input(self, smga):
        shots = sweep_speeds(smga, [1.2, 0.4])
        assert [shot.speed for shot in shots] == [1.2, 0.4]
        assert check_ordering(shots).speeds == (0.4, 1.2)

    def test_empty_sweep(self, smga):
        assert sweep_speeds(smga, []) == []


@pytest.mark.module
class TestAdmissibilityPredicate:
    def test_memoized(self, smga, shot_stub):
        shoot_fn = shot_stub(0.7)
        predicate = AdmissibilityPredicate(smga, 1e-6, 1e-6, None, shoot_fn)
        assert predicate(0.8) is True
        assert predicate(0.8) is True
        assert len(shoot_fn.calls) == 1

    def test_refines_delta_when_inconclusive(self, smga, shot_stub):
        shoot_fn = shot_stub(0.7, band=0.05, band_delta=1e-6)
        predicate = AdmissibilityPredicate(smga, 1e-6, 1e-6, None, shoot_fn)
        assert predicate(0.72) is True
        assert [delta for _, delta in shoot_fn.calls] == pytest.approx([1e-6, 1e-7])
        assert predicate.refinements == 1

    def test_gives_up_after_refinements(self, smga, shot_stub):
        shoot_fn = shot_stub(0.7, band=0.05, band_delta=0.0)
        predicate = AdmissibilityPredicate(smga, 1e-6, 1e-6, None, shoot_fn)
        with pytest.raises(Inconclusive):
            predicate(0.72)
        assert len(shoot_fn.calls) == MAX_REFINEMENTS + 1


@pytest.mark.module
class TestThresholdWithStubs:
    def test_bisection(self, smga, shot_stub):
        report = find_threshold(
            smga, tol_c=1e-3, bounds=REFERENCE_BOUNDS, shoot_fn=shot_stub(0.7)
        )
        assert report.c_lo < 0.7 <= report.c_hi
        assert report.bracket_width <= 1e-3
        assert report.c0 == pytest.approx(0.5 * (report.c_lo + report.c_hi))
        assert report.monotone
        assert report.contained
        assert report.evaluations[0][0] == pytest.approx(REFERENCE_BOUNDS.c_sharp * (1 - 1e-3))

    def test_report_dict(self, smga, shot_stub):
        report = find_threshold(smga, tol_c=1e-2, bounds=REFERENCE_BOUNDS, shoot_fn=shot_stub(0.7))
        data = report.as_dict(include_shots=False)
        assert "shots" not in data
        assert data["lo_admissible"] is False and data["hi_admissible"] is True
        assert len(report.as_dict()["shots"]) == len(report.shots)

    def test_endpoint_verdicts_come_from_evaluations(self, smga, shot_stub):
        report = find_threshold(smga, tol_c=1e-2, bounds=REFERENCE_BOUNDS, shoot_fn=shot_stub(0.7))
        verdicts = dict(report.evaluations)
        assert report.lo_admissible is verdicts[report.c_lo] is False
        assert report.hi_admissible is verdicts[report.c_hi] is True
        flipped = replace(report, evaluations=[(report.c_lo, True)])
        assert flipped.lo_admissible is True
        assert flipped.hi_admissible is None
        assert flipped.as_dict(include_shots=False)["hi_admissible"] is None

    def test_bad_bracket(self, smga, shot_stub):
        with pytest.raises(BadBracket):
            find_threshold(smga, bounds=REFERENCE_BOUNDS, shoot_fn=shot_stub(5.0))

    def test_bounds_only_model(self):
        with pytest.raises(NotShootable):
            find_threshold(build_power_law(3, 1, bounds_only=True), bounds=REFERENCE_BOUNDS)

    def test_refine_walks_upper_end(self, smga, shot_stub):
        shoot_fn = shot_stub(0.7, shift=lambda delta: 0.7 if delta > 1e-7 else 0.71)
        report = find_threshold(smga, tol_c=1e-3, bounds=REFERENCE_BOUNDS, shoot_fn=shoot_fn)
        refined = refine_threshold(smga, report, tol=1e-7, shoot_fn=shoot_fn)
        assert refined.delta == 1e-8
        assert refined.c_lo < 0.71 <= refined.c_hi
        assert refined.bracket_width <= 1e-7

    def test_threshold_shot_uses_fit_offset(self, smga, shot_stub):
        shoot_fn = shot_stub(0.7)
        report = find_threshold(smga, tol_c=1e-3, bounds=REFERENCE_BOUNDS, shoot_fn=shoot_fn)
        shot = threshold_shot(smga, report, shoot_fn=shoot_fn)
        assert shot.speed == report.c_hi
        assert shot.delta == 1e-4

    def test_conjecture_gap(self, smga, shot_stub):
        report = find_threshold(smga, tol_c=1e-3, bounds=REFERENCE_BOUNDS, shoot_fn=shot_stub(0.7))
        assert conjecture_gap(report) == pytest.approx(abs(report.c0 - math.sqrt(0.5)) / math.sqrt(0.5))

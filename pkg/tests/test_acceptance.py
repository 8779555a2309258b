"""
Acceptance checks on the reference model g(s) = s, h(r) = r, f = s r and the
power-law family, against the closed forms and the proven qualitative facts.
"""

import math
import time

import pytest

from bounds.estimates import closed_form_power_law, compute_bounds
from modelspec.specs import build_power_law
from profiles.reconstruct import check_first_integral, front_edge, reconstruct
from shooting.shots import Regime, check_ordering, classify_regime, shoot, sweep_speeds
from shooting.threshold import conjecture_gap

pytestmark = pytest.mark.acceptance


class TestBounds:
    def test_closed_forms(self):
        started = time.perf_counter()
        for alpha in (0.5, 1.0, 2.0, 3.0):
            m = build_power_law(alpha, 1.0, bounds_only=alpha != 1.0)
            bounds = compute_bounds(m)
            branch1, branch2 = closed_form_power_law(alpha)
            assert bounds.c_sharp_branch1 == pytest.approx(branch1, rel=1e-8)
            assert bounds.c_sharp_branch2 == pytest.approx(branch2, rel=1e-8)
        assert time.perf_counter() - started < 1.0

    def test_reference_constants(self, smga):
        bounds = compute_bounds(smga)
        assert bounds.c_sharp == pytest.approx(0.28867513, abs=1e-6)
        assert bounds.c_star == pytest.approx(2.0, abs=1e-6)

    @pytest.mark.parametrize("alpha, dominant", [(1.9, "1"), (2.1, "2")])
    def test_crossover(self, alpha, dominant):
        bounds = compute_bounds(build_power_law(alpha, 1.0, bounds_only=True))
        assert bounds.dominant_branch == dominant

    def test_branches_meet(self):
        bounds = compute_bounds(build_power_law(2.0, 1.0, bounds_only=True))
        assert bounds.c_sharp_branch1 == pytest.approx(bounds.c_sharp_branch2, rel=1e-6)


class TestShooting:
    @pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
    def test_launch_series(self, smga, c):
        eps = 1e-5
        shot = shoot(smga, c, eps=eps)
        measured = (float(shot.B_at(eps)) - 1.0 + eps) / eps**2
        assert measured == pytest.approx(1.0 / c**2, rel=1e-2)

    def test_slow_speed_not_admissible(self, smga):
        assert shoot(smga, 0.2).admissible is False

    def test_fast_speed_classical(self, smga):
        shot = shoot(smga, 2.5)
        assert shot.admissible is True
        assert shot.regime == Regime.CLASSICAL
        assert 0.85 <= shot.tail.exponent <= 1.15

    def test_trajectories_ordered(self, smga):
        check = check_ordering(sweep_speeds(smga, [0.4, 0.8, 1.2]))
        assert check.passed
        assert check.worst_violation <= 1e-8


@pytest.mark.slow
class TestThreshold:
    def test_bracket(self, smga_threshold):
        report = smga_threshold
        assert report.bracket_width <= 1e-3
        assert 0.2887 <= report.c_lo and report.c_hi <= 2.0
        assert report.monotone
        assert report.contained

    def test_sharp_tail(self, smga, smga_sharp_shot):
        tail = smga_sharp_shot.tail
        c = smga_sharp_shot.speed
        assert 0.35 <= tail.exponent <= 0.65
        assert tail.amplitude == pytest.approx(c * math.sqrt(2.0), rel=0.25)

    def test_conjecture_gap_reported(self, smga_threshold):
        gap = conjecture_gap(smga_threshold)
        assert math.isfinite(gap) and gap >= 0.0


@pytest.mark.slow
class TestProfiles:
    @pytest.fixture(scope="class")
    def sharp(self, smga, smga_sharp_shot):
        return reconstruct(smga, smga_sharp_shot)

    @pytest.fixture(scope="class")
    def classical(self, smga, smga_threshold):
        return reconstruct(smga, shoot(smga, smga_threshold.c0 + 0.5))

    def test_first_integral(self, sharp, classical):
        assert check_first_integral(sharp).passed
        assert check_first_integral(classical).passed

    def test_barrier(self, sharp, classical):
        assert sharp.barrier_min >= 1.0 - 1e-8
        assert classical.barrier_min >= 1.0 - 1e-8

    def test_sharp_edge_slope(self, smga, sharp):
        assert sharp.edge_slope == pytest.approx(smga.edge_slope(sharp.speed), rel=0.05)

    def test_front_edge_dichotomy(self, smga, smga_threshold, smga_sharp_shot, sharp, classical):
        assert sharp.tau_status == "finite"
        assert front_edge(smga, smga_sharp_shot).finite
        assert classical.tau_status == "infinite"

    def test_regimes(self, smga, smga_refined, smga_sharp_shot):
        c0 = smga_refined.c0
        assert classify_regime(smga, smga_sharp_shot.speed, c0, smga_sharp_shot) == Regime.SHARP
        classical = shoot(smga, c0 + 0.5)
        assert classify_regime(smga, classical.speed, c0, classical) == Regime.CLASSICAL

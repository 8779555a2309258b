import math

from django.test import SimpleTestCase, override_settings

from numerics.conf import DEFAULTS, get_setting
from numerics.exceptions import BadBracket, NonConvergence
from numerics.integrate import EventSpec, IntegratorConfig
from numerics.quadrature import quad_adaptive
from numerics.roots import Bracket, bisect_monotone


class TestSettings(SimpleTestCase):
    @override_settings(DEGENWAVE={"RTOL": 1e-6})
    def test_override_wins(self):
        self.assertEqual(get_setting("RTOL"), 1e-6)
        self.assertEqual(get_setting("ATOL"), DEFAULTS["ATOL"])

    @override_settings(DEGENWAVE={})
    def test_defaults_when_missing(self):
        self.assertEqual(get_setting("SHOOT_METHOD"), "LSODA")
        self.assertEqual(get_setting("EPS"), 1e-6)

    @override_settings(DEGENWAVE={"RTOL": 1e-7, "ATOL": 1e-9})
    def test_integrator_config_from_settings(self):
        config = IntegratorConfig.from_settings(method="RK45", max_steps=10)
        self.assertEqual(config.rel_tol, 1e-7)
        self.assertEqual(config.abs_tol, 1e-9)
        self.assertEqual(config.max_steps, 10)
        self.assertEqual(config.method, "RK45")


class TestIntegratorConfig(SimpleTestCase):
    def test_rejects_non_positive_tolerance(self):
        with self.assertRaises(ValueError):
            IntegratorConfig(rel_tol=0.0)

    def test_rejects_unknown_method(self):
        with self.assertRaises(ValueError):
            IntegratorConfig(method="Euler")

    def test_as_dict(self):
        data = IntegratorConfig().as_dict()
        self.assertEqual(
            set(data), {"rel_tol", "abs_tol", "max_steps", "min_step", "method"}
        )


class TestEventSpec(SimpleTestCase):
    def test_directions(self):
        falling = EventSpec(lambda t, y: y[0], "falling")
        rising = EventSpec(lambda t, y: y[0], "rising")
        either = EventSpec(lambda t, y: y[0])
        self.assertTrue(falling.crossed(1.0, -1.0))
        self.assertFalse(falling.crossed(-1.0, 1.0))
        self.assertTrue(rising.crossed(-1.0, 1.0))
        self.assertFalse(rising.crossed(1.0, -1.0))
        self.assertTrue(either.crossed(1.0, -1.0))
        self.assertTrue(either.crossed(-1.0, 0.0))

    def test_rejects_unknown_direction(self):
        with self.assertRaises(ValueError):
            EventSpec(lambda t, y: y[0], "sideways")


class TestQuadrature(SimpleTestCase):
    def test_polynomial(self):
        result = quad_adaptive(lambda r: (1.0 - r) * r**2, 0.0, 1.0)
        self.assertAlmostEqual(result.value, 1.0 / 12.0, delta=1e-12)

    def test_zero_integrand(self):
        self.assertEqual(quad_adaptive(lambda r: 0.0, 0.0, 1.0).value, 0.0)

    def test_empty_interval(self):
        result = quad_adaptive(math.exp, 0.3, 0.3)
        self.assertEqual((result.value, result.subdivisions), (0.0, 0))

    def test_reversed_limits(self):
        self.assertAlmostEqual(quad_adaptive(lambda x: x * x, 1.0, 0.0).value, -1.0 / 3.0, delta=1e-12)

    def test_subdivision_cap(self):
        with self.assertRaises(NonConvergence):
            quad_adaptive(lambda x: math.sin(200.0 * x), 0.0, 1.0, max_subdivisions=1)

    def test_unknown_flag(self):
        with self.assertRaises(ValueError):
            quad_adaptive(math.exp, 0.0, 1.0, singular_endpoints="middle")


class TestBisection(SimpleTestCase):
    def test_bracket_contains_switch(self):
        bracket = bisect_monotone(lambda c: c >= 1.3, 0.0, 2.0, 1e-6)
        self.assertLess(bracket.lo, 1.3)
        self.assertGreaterEqual(bracket.hi, 1.3)
        self.assertLessEqual(bracket.width, 1e-6)

    def test_false_at_both_ends(self):
        with self.assertRaises(BadBracket):
            bisect_monotone(lambda c: False, 0.0, 2.0, 1e-6)

    def test_true_at_both_ends(self):
        with self.assertRaises(BadBracket):
            bisect_monotone(lambda c: True, 0.0, 2.0, 1e-6)

    def test_rejects_bad_tolerance(self):
        with self.assertRaises(ValueError):
            bisect_monotone(lambda c: c > 1, 0.0, 2.0, 0.0)

    def test_bracket_properties(self):
        bracket = Bracket(1.0, 1.5)
        self.assertEqual(bracket.width, 0.5)
        self.assertEqual(bracket.midpoint, 1.25)

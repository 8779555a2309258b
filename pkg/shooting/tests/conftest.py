import pytest

from shooting.tests.stubs import make_shot


@pytest.fixture
def shot_stub():
    """Factory for a shoot function admissible from ``switch`` upwards.

    ``band`` adds an inconclusive window above the switch for stop offsets
    of at least ``band_delta``; ``shift(delta)`` moves the switch with the
    stop offset.
    """

    def factory(switch, band=0.0, band_delta=1e-6, shift=None):
        calls = []

        def shoot_fn(m, c, eps, delta, config):
            calls.append((c, delta))
            start = switch if shift is None else shift(delta)
            if c < start:
                return make_shot(c, delta, "blocked")
            if c < start + band and delta >= band_delta:
                return make_shot(c, delta, "inconclusive")
            return make_shot(c, delta, "admissible")

        shoot_fn.calls = calls
        return shoot_fn

    return factory

from django.conf import settings

# Fallbacks for keys missing from settings.DEGENWAVE
DEFAULTS = {
    "RTOL": 1e-10,
    "ATOL": 1e-12,
    "MAX_STEPS": 2_000_000,
    "MIN_STEP": 1e-14,
    "SHOOT_METHOD": "LSODA",
    "EPS": 1e-6,
    "DELTA": 1e-6,
    "TOL_C": 1e-3,
    "QUAD_TOL": 1e-10,
    "QUAD_MAX_SUBDIVISIONS": 10_000,
    "AUDIT_GRID": 64,
    "FIT_DELTA": 1e-4,
    "SHARP_TOL": 1e-7,
    "SAMPLES": 4096,
    "PDE": {},
}


def get_setting(name):
    """Return a numerical default, preferring settings.DEGENWAVE over DEFAULTS."""
    overrides = getattr(settings, "DEGENWAVE", {}) or {}
    if name in overrides:
        return overrides[name]
    return DEFAULTS[name]

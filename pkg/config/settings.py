"""
Django settings for the degenwave project.

The project is used headless: management commands are the only entry point,
so there are no URLs, templates or middleware. Django provides configuration,
logging, caching and the run-manifest store.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.1/ref/settings/
"""

import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Only used for signing, which nothing here does; still required by Django.
SECRET_KEY = os.environ.get("DJANGO_SECRET_KEY", "degenwave-local-only-key")

DEBUG = os.environ.get("DJANGO_DEBUG", "0") == "1"

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    # Local apps
    "numerics.apps.NumericsConfig",
    "modelspec.apps.ModelspecConfig",
    "bounds.apps.BoundsConfig",
    "shooting.apps.ShootingConfig",
    "profiles.apps.ProfilesConfig",
    "pdesim.apps.PdesimConfig",
    "cli.apps.CliConfig",
]

# Database Configuration (run manifests only)
DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": os.environ.get("DEGENWAVE_DB", BASE_DIR / "degenwave.sqlite3"),
    }
}

# Cache configuration. `--cache DIR` swaps in a file-based cache at runtime.
CACHES = {
    "default": {
        "BACKEND": "django.core.cache.backends.locmem.LocMemCache",
        "LOCATION": "degenwave-default",
    },
    "shots": {
        "BACKEND": "django.core.cache.backends.locmem.LocMemCache",
        "LOCATION": "degenwave-shots",
        "TIMEOUT": None,
        "OPTIONS": {
            "MAX_ENTRIES": 5000,
            "CULL_FREQUENCY": 2,
        },
    },
}


def _env_float(name, default):
    value = os.environ.get(f"DEGENWAVE_{name}")
    return float(value) if value is not None else default


# Numerical defaults, read through numerics.conf.get_setting
DEGENWAVE = {
    "RTOL": _env_float("RTOL", 1e-10),
    "ATOL": _env_float("ATOL", 1e-12),
    "MAX_STEPS": int(_env_float("MAX_STEPS", 2_000_000)),
    "MIN_STEP": _env_float("MIN_STEP", 1e-14),
    "SHOOT_METHOD": os.environ.get("DEGENWAVE_SHOOT_METHOD", "LSODA"),
    "EPS": _env_float("EPS", 1e-6),
    "DELTA": _env_float("DELTA", 1e-6),
    "TOL_C": _env_float("TOL_C", 1e-3),
    "QUAD_TOL": _env_float("QUAD_TOL", 1e-10),
    "QUAD_MAX_SUBDIVISIONS": int(_env_float("QUAD_MAX_SUBDIVISIONS", 10_000)),
    "AUDIT_GRID": int(_env_float("AUDIT_GRID", 64)),
    "FIT_DELTA": _env_float("FIT_DELTA", 1e-4),
    "SHARP_TOL": _env_float("SHARP_TOL", 1e-7),
    "SAMPLES": int(_env_float("SAMPLES", 4096)),
    "PDE": {
        "length": 400.0,
        "cells": 4000,
        "end_time": 300.0,
        "cfl": 0.4,
        "output_every": 1.0,
        "step_at": 20.0,
        "step_width": 1.0,
        "face_rule": "arithmetic",
    },
}

DEGENWAVE_VERSION = "0.3.0"

# Internationalization
# https://docs.djangoproject.com/en/5.1/topics/i18n/

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True

# Default primary key field type
DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# Logging Configuration
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {module} {process:d} {thread:d} {message}",
            "style": "{",
        },
        "simple": {
            "format": "{levelname} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "simple",
            "level": "INFO",
        },
        "file": {
            "class": "logging.FileHandler",
            "filename": os.environ.get("DEGENWAVE_LOG", "degenwave.log"),
            "formatter": "verbose",
            "level": "DEBUG",
            "delay": True,
        },
    },
    "loggers": {
        "django": {
            "handlers": ["console", "file"],
            "level": "WARNING",
            "propagate": True,
        },
        "numerics": {
            "handlers": ["console", "file"],
            "level": "INFO",
            "propagate": False,
        },
        "modelspec": {
            "handlers": ["console", "file"],
            "level": "INFO",
            "propagate": False,
        },
        "bounds": {
            "handlers": ["console", "file"],
            "level": "INFO",
            "propagate": False,
        },
        "shooting": {
            "handlers": ["console", "file"],
            "level": "DEBUG",
            "propagate": False,
        },
        "profiles": {
            "handlers": ["console", "file"],
            "level": "INFO",
            "propagate": False,
        },
        "pdesim": {
            "handlers": ["console", "file"],
            "level": "INFO",
            "propagate": False,
        },
        "cli": {
            "handlers": ["console", "file"],
            "level": "INFO",
            "propagate": False,
        },
    },
}

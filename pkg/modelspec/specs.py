"""
Problem instances for the system n_t = -f(n, b), b_t = [g(n) h(b) b_x]_x + f(n, b).

A ModelSpec bundles the evaluators f, g, h with the structural constants the
bounds and the shooting launch need. Evaluators are plain picklable callables
that accept numpy arrays, so specs can be shipped to joblib workers.
"""

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import numpy as np

from .exceptions import (
    ConfigError,
    DegenerateCornerDerivative,
    UnboundedCornerDerivative,
    CornerDerivativeError,
)

logger = logging.getLogger(__name__)

FAMILY_CHOICES = ("power_law", "custom")
REACTION_CHOICES = ("product", "monod")

# Fixed sampling lattice used to fingerprint evaluators
_FINGERPRINT_GRID = np.linspace(0.0, 1.0, 17)


@dataclass(frozen=True)
class PowerLaw:
    """x -> x**exponent on [0, 1], clamped at 0 from below."""

    exponent: float

    def __call__(self, x):
        return np.power(np.maximum(x, 0.0), self.exponent)


@dataclass(frozen=True)
class ProductReaction:
    def __call__(self, s, r):
        return np.maximum(s, 0.0) * np.maximum(r, 0.0)


@dataclass(frozen=True)
class MonodReaction:
    k: float = 0.0

    def __call__(self, s, r):
        s = np.maximum(s, 0.0)
        return s * np.maximum(r, 0.0) / (1.0 + self.k * s)


@dataclass(frozen=True)
class ScaledReaction:
    base: Callable
    factor: float

    def __call__(self, s, r):
        return self.factor * self.base(s, r)


@dataclass(frozen=True)
class ScaledEvaluator:
    base: Callable
    factor: float

    def __call__(self, x):
        return self.factor * self.base(x)


@dataclass(frozen=True)
class FamilyTag:
    name: str = "custom"
    alpha: Optional[float] = None
    gamma: Optional[float] = None
    reaction_kind: Optional[str] = None
    k: Optional[float] = None

    def as_dict(self):
        return {
            "name": self.name,
            "alpha": self.alpha,
            "gamma": self.gamma,
            "reaction_kind": self.reaction_kind,
            "k": self.k,
        }

    def __str__(self):
        if self.name == "power_law":
            reaction = self.reaction_kind
            if reaction == "monod":
                reaction = f"monod(k={self.k:g})"
            return f"power_law(alpha={self.alpha:g}, gamma={self.gamma:g}, {reaction})"
        return self.name


def _finite_positive(value):
    return value is not None and math.isfinite(value) and value > 0.0


@dataclass(frozen=True)
class ModelSpec:
    reaction: Callable
    diff_g: Callable
    diff_h: Callable
    L1: float
    L2: float
    Mg: float
    dg0: float
    dh0: float
    dfdn01: float
    dfdb10: float
    family_tag: FamilyTag = field(default_factory=FamilyTag)
    bounds_only: bool = False

    def f(self, s, r):
        return self.reaction(np.asarray(s, dtype=float), np.asarray(r, dtype=float))

    def g(self, s):
        return self.diff_g(np.asarray(s, dtype=float))

    def h(self, r):
        return self.diff_h(np.asarray(r, dtype=float))

    @property
    def shootable(self):
        """Finite positive corner derivatives are needed by the launch series."""
        return not self.bounds_only and all(
            _finite_positive(value)
            for value in (self.dg0, self.dh0, self.dfdn01, self.dfdb10)
        )

    @property
    def g1(self):
        return float(self.g(1.0))

    @property
    def h1(self):
        return float(self.h(1.0))

    def sharp_amplitude(self, c):
        """Amplitude A in B ~ A sqrt(1 - eta) for the sharp front at speed c."""
        return c * math.sqrt(2.0 / (self.g1 * self.dh0 * self.dfdb10))

    def launch_curvature(self, c):
        return self.h1 * self.dg0 * self.dfdn01 / c**2

    def edge_slope(self, c):
        return -c / (self.g1 * self.dh0)

    def scaled(self, factor):
        """Return the model with f multiplied by ``factor``."""
        if not factor > 0:
            raise ValueError("factor must be positive")
        return replace(
            self,
            reaction=ScaledReaction(self.reaction, factor),
            L1=self.L1 * factor,
            L2=self.L2 * factor,
            dfdn01=self.dfdn01 * factor,
            dfdb10=self.dfdb10 * factor,
            family_tag=FamilyTag(name="custom"),
        )

    def scaled_h(self, factor):
        if not factor > 0:
            raise ValueError("factor must be positive")
        return replace(
            self,
            diff_h=ScaledEvaluator(self.diff_h, factor),
            dh0=self.dh0 * factor,
            family_tag=FamilyTag(name="custom"),
        )

    def constants(self):
        return {
            "L1": self.L1,
            "L2": self.L2,
            "Mg": self.Mg,
            "dg0": self.dg0,
            "dh0": self.dh0,
            "dfdn01": self.dfdn01,
            "dfdb10": self.dfdb10,
        }

    @property
    def fingerprint(self):
        """Stable hash of constants, family and sampled evaluator values."""
        s, r = np.meshgrid(_FINGERPRINT_GRID, _FINGERPRINT_GRID, indexing="ij")
        digest = hashlib.sha256()
        digest.update(
            json.dumps(
                {
                    "family": self.family_tag.as_dict(),
                    "bounds_only": self.bounds_only,
                    "constants": {k: repr(v) for k, v in self.constants().items()},
                },
                sort_keys=True,
            ).encode()
        )
        for values in (self.f(s, r), self.g(_FINGERPRINT_GRID), self.h(_FINGERPRINT_GRID)):
            digest.update(np.ascontiguousarray(values, dtype=float).tobytes())
        return digest.hexdigest()

    def as_dict(self):
        return {
            "family": str(self.family_tag),
            "bounds_only": self.bounds_only,
            "shootable": self.shootable,
            **self.constants(),
        }


def _corner_derivative(exponent):
    """Derivative of x**exponent at 0 from the right."""
    if exponent == 1.0:
        return 1.0
    if exponent > 1.0:
        return 0.0
    return math.inf


def _reject_corner(value, which, exponent):
    if value == 0.0:
        raise DegenerateCornerDerivative(
            f"{which} = 0 for exponent {exponent:g} > 1; use bounds-only mode",
            which=which,
            value=value,
        )
    if math.isinf(value):
        raise UnboundedCornerDerivative(
            f"{which} is infinite for exponent {exponent:g} < 1; use bounds-only mode",
            which=which,
            value=value,
        )


def build_power_law(
    alpha: float,
    gamma: float,
    reaction_kind: str = "product",
    k: float = 0.0,
    bounds_only: bool = False,
) -> ModelSpec:
    """g(s) = s**alpha, h(r) = r**gamma and f = s r or s r / (1 + k s).

    Only alpha = gamma = 1 gives finite positive g'(0) and h'(0). Other
    exponents raise unless ``bounds_only`` is set, in which case the model is
    returned with g'(0), h'(0) set to 0 or inf and refuses to be shot.
    """
    if not alpha > 0 or not gamma > 0:
        raise ConfigError(f"alpha and gamma must be positive, got {alpha!r}, {gamma!r}")
    if reaction_kind not in REACTION_CHOICES:
        raise ConfigError(f"Unknown reaction kind {reaction_kind!r}")
    if reaction_kind == "monod" and not k >= 0:
        raise ConfigError(f"Monod constant k must be non-negative, got {k!r}")

    alpha, gamma = float(alpha), float(gamma)
    dg0 = _corner_derivative(alpha)
    dh0 = _corner_derivative(gamma)
    if not bounds_only:
        _reject_corner(dg0, "dg0", alpha)
        _reject_corner(dh0, "dh0", gamma)

    if reaction_kind == "monod":
        k = float(k)
        reaction = MonodReaction(k)
        L1, L2 = 1.0 / (1.0 + k), 1.0
        dfdb10 = 1.0 / (1.0 + k)
    else:
        k = None
        reaction = ProductReaction()
        L1, L2 = 1.0, 1.0
        dfdb10 = 1.0

    return ModelSpec(
        reaction=reaction,
        diff_g=PowerLaw(alpha),
        diff_h=PowerLaw(gamma),
        L1=L1,
        L2=L2,
        Mg=1.0,
        dg0=dg0,
        dh0=dh0,
        dfdn01=1.0,
        dfdb10=dfdb10,
        family_tag=FamilyTag("power_law", alpha, gamma, reaction_kind, k),
        bounds_only=bool(bounds_only),
    )


def build_custom(
    reaction: Callable,
    diff_g: Callable,
    diff_h: Callable,
    dg0: float,
    dh0: float,
    dfdn01: float,
    dfdb10: float,
    L1: Optional[float] = None,
    L2: Optional[float] = None,
    Mg: Optional[float] = None,
    grid_n: Optional[int] = None,
    bounds_only: bool = False,
) -> ModelSpec:
    """Library-only construction from user evaluators.

    Evaluators must accept numpy arrays. Missing sandwich or comparison
    constants are estimated on a grid; corner derivatives are never estimated.
    """
    if None in (L1, L2, Mg):
        from .audit import estimate_constants

        estimates = estimate_constants(reaction, diff_g, diff_h, grid_n)
        L1 = estimates[0] if L1 is None else L1
        L2 = estimates[1] if L2 is None else L2
        Mg = estimates[2] if Mg is None else Mg
        logger.info("Estimated constants L1=%.6g L2=%.6g Mg=%.6g", L1, L2, Mg)

    return ModelSpec(
        reaction=reaction,
        diff_g=diff_g,
        diff_h=diff_h,
        L1=float(L1),
        L2=float(L2),
        Mg=float(Mg),
        dg0=float(dg0),
        dh0=float(dh0),
        dfdn01=float(dfdn01),
        dfdb10=float(dfdb10),
        family_tag=FamilyTag("custom"),
        bounds_only=bool(bounds_only),
    )


def config_hash(data: Dict[str, Any]) -> str:
    return hashlib.sha256(json.dumps(data, sort_keys=True).encode()).hexdigest()


def model_from_config(data: Dict[str, Any]) -> ModelSpec:
    """Validate a JSON model config and build the model it describes.

    Falls back to bounds-only mode, with a warning, when the strict build
    fails on corner derivatives.
    """
    from .forms import ModelConfigForm

    form = ModelConfigForm.from_json(data)
    if not form.is_valid():
        errors = form.errors.get_json_data()
        details = "; ".join(
            f"{name}: {', '.join(e['message'] for e in messages)}"
            for name, messages in errors.items()
        )
        raise ConfigError(f"Invalid model config: {details}", errors=errors)

    cleaned = form.cleaned_data
    kwargs = {
        "alpha": cleaned["alpha"],
        "gamma": cleaned["gamma"],
        "reaction_kind": cleaned["reaction_kind"],
        "k": cleaned["k"] or 0.0,
    }
    if cleaned["bounds_only"]:
        return build_power_law(bounds_only=True, **kwargs)
    try:
        return build_power_law(**kwargs)
    except CornerDerivativeError as exc:
        logger.warning("Falling back to bounds-only mode: %s", exc)
        return build_power_law(bounds_only=True, **kwargs)


def read_config(path) -> Dict[str, Any]:
    try:
        with open(Path(path), encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"Cannot read model config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"Model config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"Model config {path} must be a JSON object")
    return data


def load_model(path) -> ModelSpec:
    return model_from_config(read_config(path))

import json
from dataclasses import replace

import numpy as np
import pytest

from modelspec.audit import audit_assumptions, estimate_constants, require_audited
from modelspec.exceptions import AssumptionViolation, ConfigError, NonPositiveEstimate
from modelspec.specs import (
    PowerLaw,
    ProductReaction,
    build_custom,
    build_power_law,
    load_model,
    read_config,
)


@pytest.fixture
def config_file(tmp_path):
    def write(data, name="model.json"):
        path = tmp_path / name
        path.write_text(data if isinstance(data, str) else json.dumps(data))
        return path

    return write


@pytest.mark.module
class TestAudit:
    def test_reference_model_passes(self, smga):
        report = audit_assumptions(smga, 64)
        assert report.passed
        assert report.failures == []
        assert report.grid_n == 64

    def test_monod_passes_with_half(self, monod_model):
        report = audit_assumptions(monod_model, 64)
        assert report.passed
        assert monod_model.L1 == 0.5

    def test_lower_sandwich_violation(self, smga):
        broken = replace(smga, L1=2.0, dfdn01=2.0, dfdb10=2.0)
        report = audit_assumptions(broken, 64)
        assert not report.passed
        check = report.check("sandwich_lower")
        assert not check.passed
        assert check.worst_violation > 0.0

    def test_non_vanishing_h(self, smga):
        broken = replace(smga, diff_h=PowerLaw(0.0))
        report = audit_assumptions(broken, 64)
        assert not report.check("h_vanishes_at_0").passed

    def test_corner_check_is_not_blocking(self):
        m = build_power_law(3, 1, bounds_only=True)
        report = audit_assumptions(m, 64)
        assert not report.check("corner_derivatives_positive").passed
        assert report.passed

    def test_require_audited_raises(self, smga):
        broken = replace(smga, L1=2.0, dfdn01=2.0, dfdb10=2.0)
        with pytest.raises(AssumptionViolation) as caught:
            require_audited(broken)
        assert "sandwich_lower" in str(caught.value)
        assert caught.value.report is not None

    def test_small_grid_rejected(self, smga):
        with pytest.raises(ValueError):
            audit_assumptions(smga, 4)

    def test_report_dict(self, smga):
        data = audit_assumptions(smga, 32).as_dict()
        assert data["passed"] is True
        assert {check["name"] for check in data["checks"]} >= {
            "sandwich_lower",
            "sandwich_upper",
            "g_comparison",
        }


@pytest.mark.module
class TestEstimateConstants:
    def test_product(self):
        L1, L2, Mg = estimate_constants(ProductReaction(), PowerLaw(1.0), PowerLaw(1.0))
        assert L1 == pytest.approx(0.99)
        assert L2 == pytest.approx(1.01)
        assert Mg == pytest.approx(0.99)

    def test_monod(self):
        L1, L2, _ = estimate_constants(lambda s, r: s * r / (1.0 + s), PowerLaw(1.0))
        assert 0.49 <= L1 <= 0.5
        assert 0.99 <= L2 <= 1.01

    def test_increasing_g(self):
        _, _, Mg = estimate_constants(ProductReaction(), lambda s: s * (2.0 - s))
        assert Mg == pytest.approx(0.99)

    def test_non_positive_estimate(self):
        with pytest.raises(NonPositiveEstimate):
            estimate_constants(lambda s, r: 0.0 * s * r, PowerLaw(1.0))

    def test_build_custom_fills_constants(self):
        m = build_custom(
            reaction=lambda s, r: 2.0 * s * r,
            diff_g=PowerLaw(1.0),
            diff_h=PowerLaw(1.0),
            dg0=1.0,
            dh0=1.0,
            dfdn01=2.0,
            dfdb10=2.0,
        )
        assert m.L1 == pytest.approx(1.98)
        assert m.L2 == pytest.approx(2.02)
        assert m.family_tag.name == "custom"
        assert audit_assumptions(m, 32).passed

    def test_scaled_h_model(self, smga):
        m = smga.scaled_h(4.0)
        assert m.dh0 == 4.0
        assert np.allclose(m.h(np.array([0.25, 0.5])), [1.0, 2.0])


@pytest.mark.module
class TestConfigFiles:
    def test_load_model(self, config_file):
        path = config_file({"family": "power_law", "alpha": 1, "gamma": 1, "reaction": {"kind": "product"}})
        m = load_model(path)
        assert m.family_tag.alpha == 1.0
        assert m.shootable

    def test_invalid_json(self, config_file):
        with pytest.raises(ConfigError, match="not valid JSON"):
            read_config(config_file("{not json"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="Cannot read"):
            read_config(tmp_path / "missing.json")

    def test_non_object(self, config_file):
        with pytest.raises(ConfigError, match="JSON object"):
            read_config(config_file("[1, 2]"))

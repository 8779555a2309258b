import json
from io import StringIO

import pandas as pd
import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from cli.models import RunManifest

pytestmark = [pytest.mark.integration, pytest.mark.django_db]

SMGA = {"family": "power_law", "alpha": 1.0, "gamma": 1.0, "reaction": {"kind": "product"}}


@pytest.fixture
def model_path(tmp_path):
    path = tmp_path / "smga.json"
    path.write_text(json.dumps(SMGA))
    return str(path)


def run(name, out, *args):
    stdout = StringIO()
    call_command(name, *args, "--out", str(out), stdout=stdout)
    return stdout.getvalue()


def read_json(path):
    return json.loads(path.read_text())


class TestShoot:
    def test_classical_speed(self, model_path, tmp_path):
        out = tmp_path / "out"
        run("shoot", out, "--model", model_path, "--speed", "2.5")
        shot = read_json(out / "shot.json")["shot"]
        assert shot["admissible"] is True
        assert shot["regime"] == "classical"
        table = pd.read_csv(out / "shot.csv")
        assert list(table.columns) == ["eta", "B"]
        assert table["eta"].is_monotonic_increasing

    def test_slow_speed(self, model_path, tmp_path):
        out = tmp_path / "out"
        run("shoot", out, "--model", model_path, "--speed", "0.2")
        assert read_json(out / "shot.json")["shot"]["admissible"] is False
        assert read_json(out / "manifest.json")["status"] == "ok"

    def test_persistent_cache(self, model_path, tmp_path):
        cache = tmp_path / "cache"
        run("shoot", tmp_path / "first", "--model", model_path, "--speed", "1.5", "--cache", str(cache))
        assert any(cache.iterdir())
        run("shoot", tmp_path / "second", "--model", model_path, "--speed", "1.5", "--cache", str(cache))
        first = (tmp_path / "first" / "shot.csv").read_bytes()
        assert first == (tmp_path / "second" / "shot.csv").read_bytes()

    def test_bounds_only_model_cannot_shoot(self, tmp_path):
        path = tmp_path / "quadratic.json"
        path.write_text(json.dumps({**SMGA, "alpha": 2.0}))
        with pytest.raises(CommandError) as caught:
            run("shoot", tmp_path / "out", "--model", str(path), "--speed", "1")
        assert caught.value.returncode == 1


class TestProfile:
    def test_given_speed(self, model_path, tmp_path):
        out = tmp_path / "out"
        run("profile", out, "--model", model_path, "--speed", "2.5", "--svg", "--samples", "200")
        data = read_json(out / "profile.json")
        assert data["regime"] == "classical"
        assert data["first_integral"]["passed"] is True
        assert data["profile"]["tau_status"] == "infinite"
        assert data["profile"]["tau"] is None
        assert (out / "profile.svg").read_text().lstrip().startswith("<?xml")
        assert read_json(out / "manifest.json")["outputs"] == ["profile.csv", "profile.json", "profile.svg"]

    def test_not_admissible(self, model_path, tmp_path):
        with pytest.raises(CommandError) as caught:
            run("profile", tmp_path / "out", "--model", model_path, "--speed", "0.2")
        assert caught.value.returncode == 1


class TestPde:
    def test_small_run(self, model_path, tmp_path):
        out = tmp_path / "out"
        run("pde", out, "--model", model_path, "--cells", "300", "--length", "60", "--time", "20")
        data = read_json(out / "pde.json")["run"]
        assert data["config"]["cells"] == 300
        assert data["steps"] > 0
        assert len(pd.read_csv(out / "fronts.csv")) == 21
        final = pd.read_csv(out / "final_state.csv")
        assert len(final) == 300
        assert final["b"].between(0.0, 1.0).all()

    def test_reaction_off(self, model_path, tmp_path):
        out = tmp_path / "out"
        run(
            "pde", out, "--model", model_path, "--cells", "200", "--length", "40", "--time", "5",
            "--no-reaction",
        )
        data = read_json(out / "pde.json")["run"]
        assert data["mass_drift_rate"] <= 1e-8
        assert data["config"]["reaction_enabled"] is False


@pytest.mark.slow
class TestThresholdCommands:
    def test_speed(self, model_path, tmp_path):
        out = tmp_path / "out"
        run("speed", out, "--model", model_path)
        report = read_json(out / "speed.json")
        assert report["bracket_width"] <= 1e-3
        assert report["monotone"] is True
        assert report["contained"] is True
        evaluations = pd.read_csv(out / "evaluations.csv")
        assert evaluations["speed"].is_monotonic_increasing

    def test_report(self, model_path, tmp_path):
        out = tmp_path / "out"
        run("report", out, "--model", model_path, "--svg")
        report = read_json(out / "report.json")
        assert report["status"] == "ok"
        assert report["speed"]["conjecture_gap"] >= 0.0
        assert report["profiles"]["threshold"]["regime"] == "sharp"
        assert report["profiles"]["threshold"]["first_integral"]["passed"] is True
        assert report["profiles"]["classical"]["regime"] == "classical"
        assert report["profiles"]["classical"]["profile"]["tau_status"] == "infinite"
        assert {"profile_classical.csv", "profile_threshold.csv", "profile_threshold.svg"} <= {
            path.name for path in out.iterdir()
        }
        assert RunManifest.objects.filter(command="report", status="ok").exists()

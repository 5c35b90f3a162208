from __future__ import annotations

import json
import logging
import re

import pytest
from click.testing import CliRunner

from app import ALL, Settings, UnknownSuiteError, create_app, resolve_scenario, run_checks
from checks.utils import ScenarioContext
from expr import Point
from forms import load_scenario
from helpers import SCENARIOS
from models import CheckReport, CheckResult, Tolerances

LINE = re.compile(r"^CHECK [a-z0-9_]+\.\S+ max_residual=\d\.\d{3}e[+-]\d{2} at=\(\S+,\S+,\S+,\S+\) status=(PASS|FAIL)$")

SMALL = {
    "name": "small",
    "coordinates": ["t", "x", "y", "z"],
    "metric": [["1", "0", "0", "0"], ["0", "-1", "0", "0"], ["0", "0", "-1", "0"], ["0", "0", "0", "-1"]],
    "frame": {
        "kind": "orthonormal",
        "vectors": [["1", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]],
    },
    "vector_fields": {"R": ["0", "-y", "x", "0"], "X": ["t^2", "x", "0", "0"]},
    "primary": "X",
    "killing": ["R"],
    "sample": {"points": [[0.5, 0.1, -0.2, 0.3], [1.2, -0.4, 0.6, 0.1]]},
}


@pytest.fixture(scope="module")
def app():
    return create_app()


@pytest.fixture
def invoke(app):
    runner = CliRunner()

    def _invoke(*args):
        return runner.invoke(app.cli, list(args))

    return _invoke


@pytest.fixture
def small(tmp_path):
    path = tmp_path / "small.json"
    path.write_text(json.dumps(SMALL), encoding="utf-8")
    return path


def test_validate_on_cartesian_scenario(invoke):
    result = invoke("validate", "--scenario", "minkowski-cartesian")
    assert result.exit_code == 0, result.output
    lines = result.output.splitlines()
    assert lines[0] == "# scenario=minkowski-cartesian suite=validate variant=kosmann seed=7 points=32"
    assert len(lines) > 1
    for line in lines[1:]:
        assert LINE.match(line), line
        assert line.startswith("CHECK validate.")
        assert line.endswith("status=PASS")


def test_scenario_path_is_accepted(invoke):
    result = invoke("validate", "--scenario", str(SCENARIOS / "minkowski-spherical.json"))
    assert result.exit_code == 0, result.output
    assert result.output.startswith("# scenario=minkowski-spherical suite=validate")


def test_output_is_deterministic(invoke):
    first = invoke("validate", "--scenario", "minkowski-spherical", "--points", "8")
    second = invoke("validate", "--scenario", "minkowski-spherical", "--points", "8")
    assert first.output == second.output


def test_point_and_seed_overrides(invoke):
    result = invoke("validate", "--scenario", "minkowski-cartesian", "--points", "8", "--seed", "3")
    assert result.output.splitlines()[0].endswith("seed=3 points=8")


def test_json_report(invoke):
    result = invoke("validate", "--scenario", "minkowski-cartesian", "--points", "4", "--json")
    assert result.exit_code == 0, result.output
    document = json.loads(result.output)
    assert document["suite"] == "validate"
    assert document["passed"] is True
    assert document["points"] == 4
    assert {check["status"] for check in document["checks"]} == {"PASS"}
    assert all(len(check["at"]) == 4 for check in document["checks"])


def test_zero_tolerance_fails(invoke):
    result = invoke("validate", "--scenario", "minkowski-cartesian", "--points", "4", "--tol-identity", "0")
    assert result.exit_code == 1
    assert "status=FAIL" in result.output


def test_unknown_suite_is_a_usage_error(invoke):
    result = invoke("torsion", "--scenario", "minkowski-cartesian")
    assert result.exit_code == 2


def test_spin_suite_refuses_the_natural_variant(invoke):
    result = invoke("spin", "--scenario", "minkowski-cartesian", "--variant", "natural", "--points", "2")
    assert result.exit_code == 2
    assert "needs variant kosmann" in result.output


def test_missing_scenario(invoke):
    result = invoke("validate", "--scenario", "no-such-scenario")
    assert result.exit_code == 2
    assert "no-such-scenario" in result.output


def test_broken_scenario_file(invoke, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{", encoding="utf-8")
    result = invoke("validate", "--scenario", str(path))
    assert result.exit_code == 1
    assert "cannot load scenario: $: invalid JSON" in result.output


def test_explicit_points_ignore_overrides(small, caplog):
    scenario = load_scenario(small)
    with caplog.at_level(logging.WARNING, logger="kosmann"):
        report = run_checks(scenario, "validate", "kosmann", points=16, seed=4)
    assert "lists its points" in caplog.text
    assert report.points == 2
    assert report.seed is None
    assert "seed=explicit" in report.header()
    assert report.passed


def test_unknown_suite_in_run_checks(small):
    with pytest.raises(UnknownSuiteError):
        run_checks(load_scenario(small), "torsion", "kosmann")


def test_theorem81_on_small_scenario(small):
    report = run_checks(load_scenario(small), "theorem81", "kosmann")
    assert report.passed
    assert {result.name.split(".")[0] for result in report.results} == {"metric", "spin_metric", "ivw"}
    assert len(report.results) == 6


def test_oracle_on_cartesian_scenario(bundled):
    report = run_checks(bundled("minkowski-cartesian"), "oracle", "kosmann", points=4)
    assert report.passed, report.render_text()
    names = [result.name for result in report.results]
    assert "error.quadratic.u" in names
    assert "slope.B1.w" in names


def test_all_with_natural_variant_skips_spin(small, caplog):
    with caplog.at_level(logging.WARNING, logger="kosmann"):
        report = run_checks(load_scenario(small), ALL, "natural", tolerances=Tolerances())
    assert "suite spin skipped" in caplog.text
    suites = {result.suite for result in report.results}
    assert "spin" not in suites
    assert {"validate", "lie", "kosmann", "theorem81"} <= suites
    assert report.passed, report.render_text()


def test_resolve_scenario(tmp_path):
    assert resolve_scenario("schwarzschild", SCENARIOS) == SCENARIOS / "schwarzschild.json"
    assert resolve_scenario("schwarzschild.json", SCENARIOS) == SCENARIOS / "schwarzschild.json"
    with pytest.raises(FileNotFoundError):
        resolve_scenario("schwarzschild", tmp_path)


def test_settings_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("KOSMANN_TOL_IDENTITY", "1e-7")
    monkeypatch.setenv("KOSMANN_POINTS", "12")
    monkeypatch.setenv("KOSMANN_SCENARIO_DIR", str(tmp_path))
    settings = Settings.from_env()
    assert settings.tolerances == Tolerances(1e-7, 1e-4)
    assert settings.points == 12
    assert settings.scenario_dir == tmp_path


@pytest.mark.parametrize("name, value", [("KOSMANN_POINTS", "many"), ("KOSMANN_SEED", "-1"), ("KOSMANN_TOL_ORACLE", "x")])
def test_bad_environment_values(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(RuntimeError, match=name):
        Settings.from_env()


def test_environment_defaults_reach_box_plans(monkeypatch, tmp_path):
    document = dict(SMALL, sample={"box": [[0, 1], [-1, 1], [-1, 1], [-1, 1]]})
    (tmp_path / "boxed.json").write_text(json.dumps(document), encoding="utf-8")
    monkeypatch.setenv("KOSMANN_POINTS", "3")
    monkeypatch.setenv("KOSMANN_SEED", "5")
    monkeypatch.setenv("KOSMANN_SCENARIO_DIR", str(tmp_path))
    scenario = create_app().load("boxed")
    assert (scenario.plan.count, scenario.plan.seed) == (3, 5)


def test_rounding_checks_keep_their_own_threshold(small, monkeypatch):
    thresholds = {}
    measure = ScenarioContext.measure

    def recording(self, name, residual, tolerance=None):
        thresholds[name] = self.tolerances.identity if tolerance is None else tolerance
        return measure(self, name, residual, tolerance)

    monkeypatch.setattr(ScenarioContext, "measure", recording)
    run_checks(load_scenario(small), "validate", "kosmann", tolerances=Tolerances(1e-6, 1e-4))
    assert thresholds["frame_duality"] == thresholds["holonomic_symmetry"] == 1e-12
    assert thresholds["metric_symmetry"] == 1e-6


def test_text_report_prints_details_under_the_check():
    report = CheckReport("small", "oracle", "kosmann", 7, 1)
    at = Point((0.0, 0.0, 0.0, 0.0))
    report.results.append(CheckResult("oracle", "slope.X.u", 0.004, at, True, detail="slope=2.004"))
    report.results.append(CheckResult("oracle", "error.X.u", 1e-6, at, True))
    lines = report.render_text().splitlines()
    assert LINE.match(lines[1])
    assert lines[2] == "#   slope=2.004"
    assert LINE.match(lines[3])
    assert len(lines) == 4


def test_oracle_slopes_appear_in_text_output(invoke):
    result = invoke("oracle", "--scenario", "minkowski-cartesian", "--points", "4")
    assert result.exit_code == 0, result.output
    lines = result.output.splitlines()
    details = [lines[k + 1] for k, line in enumerate(lines) if line.startswith("CHECK oracle.slope.")]
    assert details
    assert all(re.fullmatch(r"#   (slope=\d\.\d{3}|exact)", detail) for detail in details)
    assert any(detail.startswith("#   slope=") for detail in details)

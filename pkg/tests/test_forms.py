from __future__ import annotations

import json

import numpy as np
import pytest

from forms import ScenarioError, load_scenario
from geometry import FrameKind
from helpers import BUNDLED, SCENARIOS
from models import Tolerances


def minkowski_document(**overrides) -> dict:
    document = {
        "name": "flat",
        "coordinates": ["t", "x", "y", "z"],
        "metric": [["1", "0", "0", "0"], ["0", "-1", "0", "0"], ["0", "0", "-1", "0"], ["0", "0", "0", "-1"]],
        "frame": {
            "kind": "orthonormal",
            "vectors": [["1", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]],
        },
        "vector_fields": {"X": ["t^2", "x", "0", "0"], "R": ["0", "-y", "x", "0"]},
        "primary": "X",
        "killing": ["R"],
        "sample": {"count": 8, "seed": 1, "box": [[0, 1], [-1, 1], [-1, 1], [-1, 1]]},
    }
    document.update(overrides)
    return document


def spherical_document(**overrides) -> dict:
    document = {
        "name": "spherical",
        "coordinates": ["t", "r", "theta", "phi"],
        "metric": [
            ["1", "0", "0", "0"],
            ["0", "-1", "0", "0"],
            ["0", "0", "-r^2", "0"],
            ["0", "0", "0", "-r^2*sin(theta)^2"],
        ],
        "frame": {
            "kind": "orthonormal",
            "vectors": [["1", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1/r", "0"], ["0", "0", "0", "1/(r*sin(theta))"]],
        },
        "vector_fields": {"radial": ["0", "r", "0", "0"]},
        "primary": "radial",
        "sample": {"count": 8, "seed": 1, "box": [[0, 1], [1, 2], [0.5, 2.5], [0, 6]]},
    }
    document.update(overrides)
    return document


@pytest.fixture
def write(tmp_path):
    def _write(document, name: str = "scenario.json"):
        path = tmp_path / name
        path.write_text(document if isinstance(document, str) else json.dumps(document), encoding="utf-8")
        return path

    return _write


def failure(path, **kwargs) -> ScenarioError:
    with pytest.raises(ScenarioError) as excinfo:
        load_scenario(path, **kwargs)
    return excinfo.value


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_scenarios_load(name):
    scenario = load_scenario(SCENARIOS / f"{name}.json")
    assert scenario.name == name
    assert scenario.frame.kind is FrameKind.ORTHONORMAL
    assert scenario.primary in scenario.vector_fields
    assert set(scenario.killing) <= set(scenario.vector_fields)


def test_cartesian_scenario_contents():
    scenario = load_scenario(SCENARIOS / "minkowski-cartesian.json")
    assert scenario.coordinates == ("t", "x", "y", "z")
    assert len(scenario.killing) == 10
    assert scenario.plan.count == 32
    assert scenario.plan.seed == 7
    assert scenario.tolerances == Tolerances(1e-9, 1e-4)
    assert [spec.name for spec in scenario.fields] == ["u", "w", "m", "psi"]
    psi = scenario.fields[-1]
    assert psi.spin and psi.frame == "tetrad"
    assert psi.components.shape == (2,)


def test_minimal_document(write):
    scenario = load_scenario(write(minkowski_document()))
    assert scenario.non_killing == ("X",)
    assert scenario.plan.draw().shape == (8, 4)
    assert scenario.fields == ()


def test_defaults_fill_missing_values(write):
    document = minkowski_document(sample={"box": [[0, 1], [-1, 1], [-1, 1], [-1, 1]]})
    scenario = load_scenario(write(document), default_count=5, default_seed=9)
    assert (scenario.plan.count, scenario.plan.seed) == (5, 9)
    assert scenario.tolerances == Tolerances()
    configured = load_scenario(write(document), default_tolerances=Tolerances(1e-8, 1e-3))
    assert configured.tolerances == Tolerances(1e-8, 1e-3)


def test_document_tolerances_beat_defaults(write):
    document = minkowski_document(tolerances={"identity": 1e-7})
    scenario = load_scenario(write(document), default_tolerances=Tolerances(1e-8, 1e-3))
    assert scenario.tolerances == Tolerances(1e-7, 1e-3)


def test_explicit_points(write):
    points = [[0.5, 0.1, 0.2, 0.3], [0.7, -0.1, 0.0, 0.4]]
    scenario = load_scenario(write(minkowski_document(sample={"points": points})))
    assert scenario.plan.is_explicit
    np.testing.assert_array_equal(scenario.plan.draw(), points)
    assert scenario.plan.with_overrides(16, 3) is scenario.plan


def test_frame_vectors_are_listed_per_vector(write):
    document = minkowski_document()
    document["frame"] = {
        "kind": "general",
        "vectors": [["1", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "1", "1", "0"], ["0", "0", "0", "1"]],
    }
    scenario = load_scenario(write(document))
    assert scenario.frame.vectors[1, 2].is_number(1)
    assert scenario.frame.vectors[2, 1].is_number(0)


def test_tensor_and_spin_fields(write):
    fields = [
        {"name": "u", "type": [1, 0], "components": {"0": "t", "2": "x*y"}},
        {"name": "m", "type": [1, 1], "frame": "tetrad", "components": {"1,2": "z"}},
        {"name": "psi", "spin": [1, 0, 0, 0, 0, 0], "components": {"0": "1", "1": "i*t"}},
    ]
    scenario = load_scenario(write(minkowski_document(fields=fields)))
    u, m, psi = scenario.fields
    assert u.components.shape == (4,) and u.components[1].is_number(0)
    assert m.frame == "tetrad" and m.components.shape == (4, 4)
    assert psi.spin and psi.counts == (1, 0, 0, 0, 0, 0)


@pytest.mark.parametrize(
    "overrides, path",
    [
        ({"metric": [["1", "t", "0", "0"], ["0", "-1", "0", "0"], ["0", "0", "-1", "0"], ["0", "0", "0", "-1"]]}, "$.metric"),
        ({"metric": [["1", "0", "0", "0"], ["0", "-1", "0"], ["0", "0", "-1", "0"], ["0", "0", "0", "-1"]]}, "$.metric[1]"),
        ({"vector_fields": {"X": ["t^2", "t + * x", "0", "0"]}}, "$.vector_fields.X[1]"),
        ({"vector_fields": {"X": ["t", "x", "0"]}}, "$.vector_fields.X"),
        ({"vector_fields": {}}, "$.vector_fields"),
        ({"primary": "Y"}, "$.primary"),
        ({"killing": ["Y"]}, "$.killing[0]"),
        ({"pairs": [["X", "Y"]]}, "$.pairs[0][1]"),
        ({"coordinates": ["t", "x", "x", "z"]}, "$.coordinates"),
        ({"sample": {"count": 8, "seed": 1}}, "$.sample"),
        ({"sample": {"count": 8, "seed": 1, "box": [[1, 0], [-1, 1], [-1, 1], [-1, 1]]}}, "$.sample.box[0]"),
        ({"sample": {"count": 0, "seed": 1, "box": [[0, 1], [-1, 1], [-1, 1], [-1, 1]]}}, "$.sample.count"),
        ({"fields": [{"name": "psi", "spin": [1, 0, 0]}]}, "$.fields[0].spin"),
        ({"fields": [{"name": "u", "type": [1, 0]}, {"name": "u", "type": [0, 1]}]}, "$.fields"),
        ({"fields": [{"name": "u", "type": [1, 0], "frame": "cartesian"}]}, "$.fields[0].frame"),
    ],
)
def test_errors_point_into_the_document(write, overrides, path):
    error = failure(write(minkowski_document(**overrides)))
    assert error.path == path
    assert str(error).startswith(f"{path}: ")


def test_stretched_orthonormal_frame_is_rejected(write):
    document = minkowski_document()
    document["frame"]["vectors"][0][0] = "2"
    assert failure(write(document)).path == "$.frame"


def test_left_handed_tetrad_is_rejected(write):
    document = minkowski_document()
    document["frame"]["vectors"][3][3] = "-1"
    error = failure(write(document))
    assert error.path == "$.frame"
    assert "right-handed" in error.message


def test_degenerate_box_corner_is_rejected(write):
    document = spherical_document(sample={"count": 8, "seed": 1, "box": [[0, 1], [0, 2], [0.5, 2.5], [0, 6]]})
    error = failure(write(document))
    assert error.path == "$.frame.vectors"
    assert "evaluation failed" in error.message


def test_spherical_document_loads(write):
    scenario = load_scenario(write(spherical_document()))
    assert scenario.coordinates[2] == "theta"
    assert scenario.killing == ()
    assert scenario.plan.region[0][1] == pytest.approx(0.9)


def test_invalid_json(write):
    error = failure(write("{not json"))
    assert error.path == "$"
    assert "invalid JSON" in error.message


def test_document_must_be_an_object(write):
    assert failure(write("[1, 2]")).path == "$"


def test_missing_file_is_reported(tmp_path):
    error = failure(tmp_path / "absent.json")
    assert "cannot read scenario file" in error.message

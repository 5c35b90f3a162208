from __future__ import annotations

import numpy as np
import pytest

from checks.utils import get_context
from expr import Evaluator
from forms import load_scenario
from geometry import Frame, FrameKind, Metric
from helpers import CARTESIAN, SCENARIOS, SPHERICAL, box_points, diagonal


@pytest.fixture(scope="session")
def numeric():
    """Evaluate an object array of expressions at points: (N,) + shape."""

    def _numeric(components, points):
        return Evaluator(points).array(components)

    return _numeric


@pytest.fixture(scope="session")
def minkowski() -> Metric:
    return Metric(diagonal(["1", "-1", "-1", "-1"], CARTESIAN))


@pytest.fixture(scope="session")
def cartesian_tetrad() -> Frame:
    return Frame(FrameKind.ORTHONORMAL, diagonal(["1", "1", "1", "1"], CARTESIAN), name="cartesian")


@pytest.fixture(scope="session")
def cartesian_points() -> np.ndarray:
    return box_points([[0.5, 1.5], [-1, 1], [-1, 1], [-1, 1]])


@pytest.fixture(scope="session")
def spherical_metric() -> Metric:
    return Metric(diagonal(["1", "-1", "-r^2", "-r^2*sin(theta)^2"], SPHERICAL))


@pytest.fixture(scope="session")
def spherical_tetrad() -> Frame:
    vectors = diagonal(["1", "1", "1/r", "1/(r*sin(theta))"], SPHERICAL)
    return Frame(FrameKind.ORTHONORMAL, vectors, name="spherical")


@pytest.fixture(scope="session")
def spherical_points() -> np.ndarray:
    return box_points([[0, 1], [1, 2], [0.5, 2.5], [0, 6]])


@pytest.fixture(scope="session")
def schwarzschild_metric() -> Metric:
    return Metric(diagonal(["1-2/r", "-1/(1-2/r)", "-r^2", "-r^2*sin(theta)^2"], SPHERICAL))


@pytest.fixture(scope="session")
def schwarzschild_points() -> np.ndarray:
    return box_points([[0, 1], [3, 6], [0.5, 2.5], [0, 6]], count=32)


@pytest.fixture(scope="session")
def bundled():
    """Load a bundled scenario by name."""
    cache = {}

    def _load(name: str):
        if name not in cache:
            cache[name] = load_scenario(SCENARIOS / f"{name}.json")
        return cache[name]

    return _load


@pytest.fixture
def context(bundled):
    def _context(name: str, variant: str = "kosmann", count: int | None = None):
        scenario = bundled(name)
        return get_context(scenario, variant, scenario.tolerances, scenario.plan.with_overrides(count))

    return _context

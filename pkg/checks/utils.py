from __future__ import annotations

import logging
import time
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.random import PCG64, Generator

from expr import Evaluator, Point
from geometry import (
    HOLONOMIC,
    ConnectionCoefficients,
    Frame,
    FrameMetric,
    christoffel_frame,
    christoffel_holonomic,
    frame_metric,
)
from lie import VARIANTS, TensorField, change_frame, random_tensor_field, vector_field
from models import CheckResult, SamplePlan, Scenario, Tolerances
from spin import SpinStructure, SpinTensorField, VariantMismatchError, canonical_structure, random_spin_tensor_field, spin_types

log = logging.getLogger(__name__)

# salts keep the random pools independent of each other and of the sample points
_POOL_SALT = {"tensor": 1, "killing": 2, "spin": 3, "spin_types": 4, "spin_pairs": 5}


@dataclass(frozen=True)
class Check:
    name: str
    run: Callable[["ScenarioContext"], Iterable[CheckResult]]


class Suite:
    """A named group of checks, registered with the app like a blueprint."""

    def __init__(self, name: str, variants: tuple[str, ...] = VARIANTS):
        self.name = name
        self.variants = variants
        self.checks: list[Check] = []

    def check(self, name: str):
        def decorator(fn):
            self.checks.append(Check(name, fn))
            return fn

        return decorator

    def supports(self, variant: str) -> bool:
        return variant in self.variants

    def run(self, ctx: "ScenarioContext") -> list[CheckResult]:
        if not self.supports(ctx.variant):
            raise VariantMismatchError(f"suite {self.name} needs variant {' or '.join(self.variants)}")
        results = []
        for check in self.checks:
            started = time.perf_counter()
            produced = list(check.run(ctx))
            elapsed = time.perf_counter() - started
            for result in produced:
                result.suite = self.name
                result.elapsed = elapsed / len(produced)
            log.info("%s.%s: %d checks in %.3fs", self.name, check.name, len(produced), elapsed)
            results.extend(produced)
        return results

    def __repr__(self) -> str:
        return f"<Suite {self.name} ({len(self.checks)} checks)>"


@dataclass(frozen=True, eq=False)
class ScenarioContext:
    """
    Everything the suites derive from one scenario, built lazily and shared.

    Symbolic quantities are cached on the context so suites run in sequence
    reuse the same trees (and the same evaluator cache).
    """

    scenario: Scenario
    variant: str
    tolerances: Tolerances
    plan: SamplePlan

    @cached_property
    def points(self) -> np.ndarray:
        return self.plan.draw()

    @cached_property
    def evaluator(self) -> Evaluator:
        return Evaluator(self.points)

    @property
    def frame(self) -> Frame:
        return self.scenario.frame

    @property
    def seed(self) -> int:
        return 0 if self.plan.is_explicit else self.plan.seed

    def rng(self, pool: str) -> Generator:
        return Generator(PCG64([self.seed, _POOL_SALT[pool]]))

    # -- geometry

    @cached_property
    def holonomic_metric(self) -> FrameMetric:
        return frame_metric(self.scenario.metric, HOLONOMIC)

    @cached_property
    def frame_metric(self) -> FrameMetric:
        return frame_metric(self.scenario.metric, self.frame)

    @cached_property
    def holonomic_connection(self) -> ConnectionCoefficients:
        return christoffel_holonomic(self.scenario.metric)

    @cached_property
    def connection(self) -> ConnectionCoefficients:
        if self.frame.is_holonomic:
            return self.holonomic_connection
        return christoffel_frame(self.frame_metric, self.frame)

    @cached_property
    def spin(self) -> SpinStructure:
        return canonical_structure(self.frame, self.frame_metric, self.connection)

    # -- fields

    @cached_property
    def holonomic_vectors(self) -> dict[str, TensorField]:
        return {name: vector_field(comps, HOLONOMIC, name) for name, comps in self.scenario.vector_fields.items()}

    @cached_property
    def vectors(self) -> dict[str, TensorField]:
        return {name: vector_field(comps, self.frame, name) for name, comps in self.scenario.vector_fields.items()}

    @cached_property
    def declared_tensors(self) -> tuple[TensorField, ...]:
        """Declared tensor fields, in the holonomic frame."""
        out = []
        for spec in self.scenario.fields:
            if spec.spin:
                continue
            frame = HOLONOMIC if spec.frame == "holonomic" else self.frame
            field = TensorField(spec.counts[0], spec.counts[1], frame, spec.components, spec.name)
            out.append(change_frame(field, HOLONOMIC))
        return tuple(out)

    @cached_property
    def holonomic_pool(self) -> tuple[TensorField, ...]:
        rng = self.rng("tensor")
        randoms = (
            random_tensor_field(rng, 1, 1, HOLONOMIC, name="random_11"),
            random_tensor_field(rng, 0, 2, HOLONOMIC, name="random_02"),
        )
        return self.declared_tensors + randoms

    @cached_property
    def tensor_pool(self) -> tuple[TensorField, ...]:
        return tuple(change_frame(field, self.frame) for field in self.holonomic_pool)

    @cached_property
    def killing_pool(self) -> tuple[TensorField, ...]:
        rng = self.rng("killing")
        return tuple(random_tensor_field(rng, 2, 2, self.frame, degree=1, name=f"random_22_{k}") for k in range(2))

    @cached_property
    def spin_pool(self) -> tuple[SpinTensorField, ...]:
        declared = tuple(
            SpinTensorField(spec.counts, self.frame, spec.components, spec.name)
            for spec in self.scenario.fields
            if spec.spin
        )
        types = [counts for counts in spin_types(3) if sum(counts) > 0]
        picked = self.rng("spin_types").choice(len(types), size=4, replace=False)
        rng = self.rng("spin")
        return declared + tuple(random_spin_tensor_field(rng, types[k], self.frame) for k in sorted(picked))

    # -- measurement

    def _worst(self, residual) -> tuple[float, Point]:
        values = np.abs(self.evaluator.array(residual)).reshape(len(self.evaluator), -1)
        per_point = values.max(axis=1) if values.shape[1] else np.zeros(len(self.evaluator))
        worst = int(np.argmax(per_point))
        return float(per_point[worst]), Point(tuple(self.points[worst]))

    def measure(self, name: str, residual, tolerance: float | None = None) -> CheckResult:
        """Max |residual| over the sample points; passes below `tolerance`."""
        tolerance = self.tolerances.identity if tolerance is None else tolerance
        value, at = self._worst(residual)
        return CheckResult("", name, value, at, value < tolerance)

    def measure_many(self, name: str, residuals: Iterable, tolerance: float | None = None) -> CheckResult:
        """One result for several residual arrays: the worst of them."""
        tolerance = self.tolerances.identity if tolerance is None else tolerance
        worst = max((self._worst(residual) for residual in residuals), key=lambda item: item[0])
        return CheckResult("", name, worst[0], worst[1], worst[0] < tolerance)

    def measure_above(self, name: str, values, threshold: float) -> CheckResult:
        """Passes when max |values| exceeds `threshold` somewhere."""
        value, at = self._worst(values)
        return CheckResult("", name, value, at, value > threshold)

    def constant(self, name: str, value: float, passed: bool, detail: str = "") -> CheckResult:
        """A point-independent measurement, reported at the first sample point."""
        return CheckResult("", name, value, Point(tuple(self.points[0])), passed, detail=detail)


def get_context(scenario: Scenario, variant: str, tolerances: Tolerances, plan: SamplePlan) -> ScenarioContext:
    return ScenarioContext(scenario, variant, tolerances, plan)

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.random import PCG64, Generator

from expr import DIMENSION, Expr, Point
from geometry import Frame, Metric

STATUS_PASS = "PASS"
STATUS_FAIL = "FAIL"


@dataclass(frozen=True)
class Tolerances:
    identity: float = 1e-9
    oracle: float = 1e-4

    def __repr__(self) -> str:
        return f"<Tolerances identity={self.identity:g} oracle={self.oracle:g}>"


@dataclass(frozen=True)
class SamplePlan:
    """Either an explicit list of points or `count` uniform draws from `box` with `seed`."""

    points: tuple[tuple[float, ...], ...] | None = None
    count: int = 32
    box: tuple[tuple[float, float], ...] | None = None
    seed: int = 0

    @property
    def is_explicit(self) -> bool:
        return self.points is not None

    def draw(self) -> np.ndarray:
        if self.is_explicit:
            return np.array(self.points, dtype=float)
        rng = Generator(PCG64(self.seed))
        low, high = np.array(self.box, dtype=float).T
        return rng.uniform(low, high, size=(self.count, DIMENSION))

    @property
    def region(self) -> tuple[np.ndarray, np.ndarray] | None:
        """The box widened by a tenth of each interval on both sides."""
        if self.box is None:
            return None
        low, high = np.array(self.box, dtype=float).T
        margin = (high - low) / 10
        return low - margin, high + margin

    def with_overrides(self, count: int | None = None, seed: int | None = None) -> "SamplePlan":
        if self.is_explicit:
            return self
        return SamplePlan(
            None,
            self.count if count is None else count,
            self.box,
            self.seed if seed is None else seed,
        )


@dataclass(frozen=True)
class FieldSpec:
    """
    A declared test field.

    `counts` is (upper, lower) for tensor fields and the six spin-tensor
    counts for spin fields. `frame` is "holonomic" or "tetrad".
    """

    name: str
    spin: bool
    counts: tuple[int, ...]
    components: np.ndarray = field(repr=False)
    frame: str = "holonomic"

    def __repr__(self) -> str:
        kind = "spin" if self.spin else "tensor"
        return f"<FieldSpec {self.name} {kind}{self.counts} in {self.frame}>"


@dataclass(frozen=True)
class Scenario:
    name: str
    coordinates: tuple[str, ...]
    metric: Metric = field(repr=False)
    frame: Frame = field(repr=False)
    vector_fields: dict[str, tuple[Expr, ...]] = field(repr=False)
    primary: str
    killing: tuple[str, ...] = ()
    pairs: tuple[tuple[str, str], ...] = ()
    oracle_fields: tuple[str, ...] = ()
    fields: tuple[FieldSpec, ...] = ()
    plan: SamplePlan = SamplePlan()
    tolerances: Tolerances | None = None
    path: Path | None = None

    @property
    def non_killing(self) -> tuple[str, ...]:
        return tuple(name for name in self.vector_fields if name not in self.killing)

    def __repr__(self) -> str:
        return f"<Scenario {self.name} ({len(self.vector_fields)} vector fields)>"


@dataclass
class CheckResult:
    suite: str
    name: str
    max_residual: float
    at: Point
    passed: bool
    elapsed: float = 0.0
    detail: str = ""

    @property
    def status(self) -> str:
        return STATUS_PASS if self.passed else STATUS_FAIL

    def line(self) -> str:
        return f"CHECK {self.suite}.{self.name} max_residual={self.max_residual:.3e} at={self.at} status={self.status}"

    def as_dict(self) -> dict:
        record = {
            "suite": self.suite,
            "name": self.name,
            "max_residual": self.max_residual,
            "at": list(self.at.coords),
            "status": self.status,
        }
        if self.detail:
            record["detail"] = self.detail
        return record

    def __repr__(self) -> str:
        return f"<CheckResult {self.suite}.{self.name} {self.status}>"


@dataclass
class CheckReport:
    scenario: str
    suite: str
    variant: str
    seed: int | None
    points: int
    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def failures(self) -> list[CheckResult]:
        return [result for result in self.results if not result.passed]

    def header(self) -> str:
        seed = "explicit" if self.seed is None else str(self.seed)
        return f"# scenario={self.scenario} suite={self.suite} variant={self.variant} seed={seed} points={self.points}"

    def render_text(self) -> str:
        lines = [self.header()]
        for result in self.results:
            lines.append(result.line())
            if result.detail:
                lines.append(f"#   {result.detail}")
        return "\n".join(lines) + "\n"

    def render_json(self) -> str:
        document = {
            "scenario": self.scenario,
            "suite": self.suite,
            "variant": self.variant,
            "seed": self.seed,
            "points": self.points,
            "passed": self.passed,
            "checks": [result.as_dict() for result in self.results],
        }
        return json.dumps(document, indent=2) + "\n"

    def __repr__(self) -> str:
        return f"<CheckReport {self.scenario}/{self.suite} {len(self.results)} checks>"

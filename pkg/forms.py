from __future__ import annotations

import itertools
import json
import logging
import math
from pathlib import Path

import numpy as np
from wtforms import BooleanField, Field, FieldList, FloatField, Form, FormField, IntegerField, StringField
from wtforms.validators import AnyOf, DataRequired, NumberRange, StopValidation, ValidationError

from expr import DIMENSION, EvaluationError, Evaluator, ExprError, check_coordinate_names, parse
from geometry import (
    Frame,
    FrameKind,
    GeometryError,
    Metric,
    SingularMetricError,
    check_frame,
    check_handedness,
    check_invertible,
    check_orthonormal,
)
from models import FieldSpec, SamplePlan, Scenario, Tolerances

log = logging.getLogger(__name__)

SPIN_RANK = 2


class ScenarioError(Exception):
    """A scenario document failed to load; `path` points into the document."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.message = message
        self.path = path


# ---------------------------------------------------------------------------
# Validators


def entries(count: int):
    def _check(form, field):
        if len(field.entries) != count:
            raise ValidationError(f"expected {count} entries, got {len(field.entries)}")

    return _check


def present(form, field):
    if field.data is None:
        raise StopValidation()


def finite(form, field):
    try:
        value = float(field.data)
    except (TypeError, ValueError):
        raise ValidationError("not a number")
    if not math.isfinite(value):
        raise ValidationError("not finite")


def expression_text(form, field):
    if not isinstance(field.data, (str, int, float)) or isinstance(field.data, bool):
        raise ValidationError("expected an expression string")


class MappingField(Field):
    """Holds a JSON object as is; entries are checked by the loader."""

    def process_data(self, value):
        self.data = {} if value is None else value

    def pre_validate(self, form):
        if not isinstance(self.data, dict):
            raise ValidationError("expected an object")


# ---------------------------------------------------------------------------
# Forms


def _row(count: int = DIMENSION):
    return FieldList(StringField(validators=[expression_text]), min_entries=0, validators=[entries(count)])


def _matrix():
    return FieldList(_row(), min_entries=0, validators=[entries(DIMENSION)])


class FrameForm(Form):
    kind = StringField(validators=[DataRequired(), AnyOf([kind.value for kind in FrameKind])])
    future_oriented = BooleanField(default=True)
    vectors = _matrix()


class SampleForm(Form):
    count = IntegerField(validators=[present, NumberRange(min=1)])
    seed = IntegerField(validators=[present, NumberRange(min=0, max=2**64 - 1)])
    box = FieldList(FieldList(FloatField(validators=[finite]), validators=[entries(2)]))
    points = FieldList(FieldList(FloatField(validators=[finite]), validators=[entries(DIMENSION)]))


class TolerancesForm(Form):
    identity = FloatField(validators=[present, NumberRange(min=0)])
    oracle = FloatField(validators=[present, NumberRange(min=0)])


class ScenarioForm(Form):
    name = StringField(validators=[DataRequired()])
    coordinates = FieldList(StringField(validators=[DataRequired()]), validators=[entries(DIMENSION)])
    metric = _matrix()
    frame = FormField(FrameForm)
    vector_fields = MappingField()
    primary = StringField(validators=[DataRequired()])
    killing = FieldList(StringField(validators=[DataRequired()]))
    pairs = FieldList(FieldList(StringField(validators=[DataRequired()]), validators=[entries(2)]))
    oracle = FieldList(StringField(validators=[DataRequired()]))
    sample = FormField(SampleForm)
    tolerances = FormField(TolerancesForm)


def _first_error(errors, path: str = "$") -> tuple[str, str] | None:
    """Walk wtforms' nested error structure down to the first message."""
    if isinstance(errors, dict):
        for key, value in errors.items():
            found = _first_error(value, path if key is None else f"{path}.{key}")
            if found:
                return found
        return None
    if isinstance(errors, (list, tuple)):
        for index, value in enumerate(errors):
            if isinstance(value, str):
                return path, value
            found = _first_error(value, f"{path}[{index}]")
            if found:
                return found
    return None


# ---------------------------------------------------------------------------
# Loading


def _parse(text, names, path: str):
    try:
        return parse(str(text), names)
    except ExprError as exc:
        raise ScenarioError(str(exc), path) from exc


def _parse_matrix(rows, names, path: str) -> np.ndarray:
    out = np.empty((DIMENSION, DIMENSION), dtype=object)
    for i, row in enumerate(rows):
        for j, text in enumerate(row):
            out[i, j] = _parse(text, names, f"{path}[{i}][{j}]")
    return out


def _parse_components(spec: dict, shape: tuple[int, ...], names, path: str) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    for index in np.ndindex(shape):
        out[index] = _parse("0", names, path)
    components = spec.get("components", {})
    if not isinstance(components, dict):
        raise ScenarioError("expected an object of index -> expression", f"{path}.components")
    for key, text in components.items():
        where = f"{path}.components[{key!r}]"
        try:
            index = tuple(int(part) for part in str(key).split(",")) if str(key) else ()
        except ValueError as exc:
            raise ScenarioError("component keys are comma-separated indices", where) from exc
        if len(index) != len(shape) or any(not 0 <= k < n for k, n in zip(index, shape)):
            raise ScenarioError(f"index {key!r} does not fit shape {shape}", where)
        out[index] = _parse(text, names, where)
    return out


def _field_spec(spec, names, path: str) -> FieldSpec:
    if not isinstance(spec, dict) or not isinstance(spec.get("name"), str):
        raise ScenarioError("a field needs a name", path)
    spin = "spin" in spec
    counts = spec.get("spin" if spin else "type")
    expected = 6 if spin else 2
    if not isinstance(counts, list) or len(counts) != expected or any(
        not isinstance(c, int) or isinstance(c, bool) or c < 0 for c in counts
    ):
        label = "spin" if spin else "type"
        raise ScenarioError(f"expected {expected} non-negative integers", f"{path}.{label}")
    if spin:
        shape = (SPIN_RANK,) * sum(counts[:4]) + (DIMENSION,) * sum(counts[4:])
        frame = "tetrad"
    else:
        shape = (DIMENSION,) * sum(counts)
        frame = spec.get("frame", "holonomic")
        if frame not in ("holonomic", "tetrad"):
            raise ScenarioError("frame must be 'holonomic' or 'tetrad'", f"{path}.frame")
    components = _parse_components(spec, shape, names, path)
    return FieldSpec(spec["name"], spin, tuple(counts), components, frame)


def _plan(form: SampleForm, default_count: int, default_seed: int) -> SamplePlan:
    if form.points.entries:
        return SamplePlan(points=tuple(tuple(float(x) for x in row) for row in form.points.data))
    box = form.box.data
    if not box:
        raise ScenarioError("the sample plan needs points or a box", "$.sample")
    if len(box) != DIMENSION:
        raise ScenarioError(f"expected {DIMENSION} intervals", "$.sample.box")
    for k, (low, high) in enumerate(box):
        if not float(low) < float(high):
            raise ScenarioError("interval is empty", f"$.sample.box[{k}]")
    count = default_count if form.count.data is None else form.count.data
    seed = default_seed if form.seed.data is None else form.seed.data
    return SamplePlan(None, count, tuple((float(lo), float(hi)) for lo, hi in box), seed)


def _probe_points(plan: SamplePlan) -> np.ndarray:
    """Sample points plus the corners and centre of the box."""
    points = plan.draw()
    if plan.box is None:
        return points
    corners = np.array(list(itertools.product(*plan.box)), dtype=float)
    centre = np.mean(np.array(plan.box, dtype=float), axis=1)[None, :]
    return np.concatenate([points, corners, centre])


def _gate(scenario: Scenario) -> None:
    """Reject scenarios whose quantities fail to evaluate on the sample plan."""
    points = _probe_points(scenario.plan)
    evaluator = Evaluator(points)

    def evaluate(components, path: str) -> None:
        try:
            evaluator.array(components)
        except EvaluationError as exc:
            raise ScenarioError(f"evaluation failed: {exc}", path) from exc

    evaluate(scenario.metric.components, "$.metric")
    evaluate(scenario.frame.vectors, "$.frame.vectors")
    for name, components in scenario.vector_fields.items():
        evaluate(np.array(components, dtype=object), f"$.vector_fields.{name}")
    for k, spec in enumerate(scenario.fields):
        evaluate(spec.components, f"$.fields[{k}]")
    try:
        check_invertible(scenario.metric.components, points, SingularMetricError, "metric")
        evaluate(scenario.metric.inverse, "$.metric")
        check_frame(scenario.frame, points)
        evaluate(scenario.frame.dual, "$.frame.vectors")
        if scenario.frame.kind is FrameKind.ORTHONORMAL:
            check_orthonormal(scenario.metric, scenario.frame, points)
            check_handedness(scenario.frame, points)
    except GeometryError as exc:
        path = "$.metric" if isinstance(exc, SingularMetricError) else "$.frame"
        raise ScenarioError(str(exc), path) from exc


def read_document(path: Path) -> dict:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file: {exc.strerror}", str(path)) from exc
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})", "$") from exc
    if not isinstance(document, dict):
        raise ScenarioError("the document must be an object", "$")
    return document


def load_scenario(
    path,
    *,
    default_count: int = 32,
    default_seed: int = 0,
    default_tolerances: Tolerances | None = None,
) -> Scenario:
    """
    Read, validate and evaluate-gate a scenario document.

    Values the document omits fall back to the given defaults; every
    failure is raised as `ScenarioError` with a JSON path.
    """
    path = Path(path)
    document = read_document(path)
    log.debug("loading scenario %s", path)

    form = ScenarioForm(data=document)
    if not form.validate():
        found = _first_error(form.errors)
        where, message = found if found else ("$", "invalid scenario")
        raise ScenarioError(message, where)

    try:
        names = check_coordinate_names(form.coordinates.data)
    except ExprError as exc:
        raise ScenarioError(str(exc), "$.coordinates") from exc

    try:
        metric = Metric(_parse_matrix(form.metric.data, names, "$.metric"))
    except GeometryError as exc:
        raise ScenarioError(str(exc), "$.metric") from exc
    frame_form = form.frame.form
    # the document lists each vector with its coordinate components; Frame wants Υ^i_m
    vectors = _parse_matrix(frame_form.vectors.data, names, "$.frame.vectors").T
    frame = Frame(frame_form.kind.data, vectors, bool(frame_form.future_oriented.data), name=f"{form.name.data}-frame")

    vector_fields = {}
    for name, components in form.vector_fields.data.items():
        where = f"$.vector_fields.{name}"
        if not isinstance(components, list) or len(components) != DIMENSION:
            raise ScenarioError(f"expected {DIMENSION} component expressions", where)
        vector_fields[name] = tuple(_parse(text, names, f"{where}[{k}]") for k, text in enumerate(components))
    if not vector_fields:
        raise ScenarioError("at least one vector field is required", "$.vector_fields")

    def known(name: str, where: str) -> str:
        if name not in vector_fields:
            raise ScenarioError(f"unknown vector field {name!r}", where)
        return name

    primary = known(form.primary.data, "$.primary")
    killing = tuple(known(name, f"$.killing[{k}]") for k, name in enumerate(form.killing.data))
    pairs = tuple(
        (known(a, f"$.pairs[{k}][0]"), known(b, f"$.pairs[{k}][1]")) for k, (a, b) in enumerate(form.pairs.data)
    )
    oracle = tuple(known(name, f"$.oracle[{k}]") for k, name in enumerate(form.oracle.data))

    raw_fields = document.get("fields", [])
    if not isinstance(raw_fields, list):
        raise ScenarioError("expected a list", "$.fields")
    fields = tuple(_field_spec(spec, names, f"$.fields[{k}]") for k, spec in enumerate(raw_fields))
    duplicates = {spec.name for spec in fields if sum(other.name == spec.name for other in fields) > 1}
    if duplicates:
        raise ScenarioError(f"duplicate field names {sorted(duplicates)}", "$.fields")

    defaults = default_tolerances or Tolerances()
    tolerance_form = form.tolerances.form
    tolerances = Tolerances(
        defaults.identity if tolerance_form.identity.data is None else float(tolerance_form.identity.data),
        defaults.oracle if tolerance_form.oracle.data is None else float(tolerance_form.oracle.data),
    )

    scenario = Scenario(
        name=form.name.data,
        coordinates=names,
        metric=metric,
        frame=frame,
        vector_fields=vector_fields,
        primary=primary,
        killing=killing,
        pairs=pairs,
        oracle_fields=oracle,
        fields=fields,
        plan=_plan(form.sample.form, default_count, default_seed),
        tolerances=tolerances,
        path=path,
    )
    _gate(scenario)
    log.debug("scenario %s: %d vector fields, %d test fields", scenario.name, len(vector_fields), len(fields))
    return scenario

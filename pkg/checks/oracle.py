from __future__ import annotations

from checks.utils import Suite
from expr import Point
from lie import SLOPE_EPSILONS, flow_oracle_lie
from models import CheckResult

# ε at which the flow estimate is compared with the formula
COMPARISON_EPSILON = 1e-3
SLOPE_RANGE = (1.8, 2.2)
EPSILONS = SLOPE_EPSILONS + (COMPARISON_EPSILON,)

oracle_suite = Suite("oracle")


@oracle_suite.check("flow")
def flow(ctx):
    for name in ctx.scenario.oracle_fields:
        X = ctx.holonomic_vectors[name]
        for field in ctx.declared_tensors:
            report = flow_oracle_lie(X, field, ctx.points, EPSILONS, ctx.plan.region)
            label = f"{name}.{field.name}"
            error = report.errors[COMPARISON_EPSILON]
            at = Point(tuple(report.worst_point(COMPARISON_EPSILON)))
            yield CheckResult("", f"error.{label}", error, at, error <= ctx.tolerances.oracle)

            slope = report.slope
            if slope is None:
                yield CheckResult("", f"slope.{label}", 0.0, at, True, detail="exact")
                continue
            low, high = SLOPE_RANGE
            deviation = abs(slope - 2.0)
            yield CheckResult("", f"slope.{label}", deviation, at, low <= slope <= high, detail=f"slope={slope:.3f}")

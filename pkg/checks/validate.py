from __future__ import annotations

import numpy as np

from expr import DIMENSION, Point, total
from checks.utils import Suite
from geometry import (
    MINKOWSKI,
    FrameKind,
    covariant_derivative_tensor,
    determinant,
    expr_array,
    identity,
    matmul,
    pull_back_metric,
)
from lie import TensorField, change_frame
from models import CheckResult

# frame duality and the symmetry of holonomic Christoffels hold to rounding
ROUNDING = 1e-12

validate_suite = Suite("validate")


@validate_suite.check("metric")
def metric(ctx):
    g = ctx.scenario.metric
    yield ctx.measure("metric_symmetry", g.components - g.components.T)
    yield ctx.measure("metric_inverse", matmul(g.components, g.inverse) - identity())


@validate_suite.check("frame")
def frame(ctx):
    f = ctx.frame
    yield ctx.measure("frame_duality", matmul(f.dual, f.vectors) - identity(), ROUNDING)
    c = f.commutation
    yield ctx.measure("commutation_antisymmetry", c + np.transpose(c, (0, 2, 1)))
    if f.kind is FrameKind.ORTHONORMAL:
        yield ctx.measure("orthonormality", pull_back_metric(ctx.scenario.metric, f) - expr_array(MINKOWSKI))
        dets = ctx.evaluator(determinant(f.vectors)).real
        worst = int(np.argmin(dets))
        yield CheckResult("", "handedness", float(dets[worst]), Point(tuple(ctx.points[worst])), bool(dets[worst] > 0))


@validate_suite.check("connection")
def connection(ctx):
    holonomic = ctx.holonomic_connection.gamma
    yield ctx.measure("holonomic_symmetry", holonomic - np.transpose(holonomic, (0, 2, 1)), ROUNDING)
    gamma, c = ctx.connection.gamma, ctx.frame.commutation
    yield ctx.measure("torsion", gamma - np.transpose(gamma, (0, 2, 1)) - c)
    g_hol = TensorField(0, 2, ctx.holonomic_connection.frame, ctx.holonomic_metric.lower)
    yield ctx.measure("metricity_holonomic", covariant_derivative_tensor(g_hol, ctx.holonomic_connection).components)
    g_frame = TensorField(0, 2, ctx.frame, ctx.frame_metric.lower)
    yield ctx.measure("metricity_frame", covariant_derivative_tensor(g_frame, ctx.connection).components)
    if ctx.frame.kind is FrameKind.ORTHONORMAL:
        gu, gl = ctx.frame_metric.upper, ctx.frame_metric.lower
        residual = np.empty((DIMENSION,) * 3, dtype=object)
        for i, m, j in np.ndindex(residual.shape):
            residual[i, m, j] = (
                total(gu[i, s] * gamma[r, m, s] * gl[r, j] for r in range(DIMENSION) for s in range(DIMENSION))
                + gamma[i, m, j]
            )
        yield ctx.measure("index_identity", residual)


@validate_suite.check("frame_change_nabla")
def frame_change_nabla(ctx):
    for field in ctx.holonomic_pool:
        via_coordinates = change_frame(covariant_derivative_tensor(field, ctx.holonomic_connection), ctx.frame)
        in_frame = covariant_derivative_tensor(change_frame(field, ctx.frame), ctx.connection)
        yield ctx.measure(
            f"frame_change_nabla.{field.name}",
            via_coordinates.components - in_frame.components,
            ctx.tolerances.identity * 10,
        )

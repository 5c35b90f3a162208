from __future__ import annotations

from checks.utils import Suite
from geometry import FrameKind
from lie import (
    TensorField,
    degenerate_action,
    generalized_lie_derivative,
    isometry_defect,
    kosmann_lift,
    kosmann_lift_from_parts,
    kosmann_lift_orthonormal,
    lie_derivative_frame,
    natural_lift,
    s_tensor,
)

KILLING_THRESHOLD = 1e-12
NON_KILLING_THRESHOLD = 1e-3

kosmann_suite = Suite("kosmann")


@kosmann_suite.check("lift")
def lift_coefficients(ctx):
    g = ctx.frame_metric
    metric_field = TensorField(0, 2, ctx.frame, g.lower, "g")
    for name, X in ctx.vectors.items():
        V = kosmann_lift(X, ctx.frame, g)
        yield ctx.measure(f"isometry.{name}", isometry_defect(V, X, g))
        yield ctx.measure(f"metric_annihilation.{name}", generalized_lie_derivative(X, V, metric_field).components)
        yield ctx.measure(f"parts.{name}", V.matrix - kosmann_lift_from_parts(X, g).matrix)
        if ctx.frame.kind is FrameKind.ORTHONORMAL:
            shortcut = kosmann_lift_orthonormal(X, g, ctx.connection)
            yield ctx.measure(f"orthonormal_form.{name}", V.matrix - shortcut.matrix)


@kosmann_suite.check("s_tensor")
def s_relation(ctx):
    g = ctx.frame_metric
    for name, X in ctx.vectors.items():
        S = s_tensor(X, g, ctx.connection)
        V_kosmann = kosmann_lift(X, ctx.frame, g).matrix
        V_natural = natural_lift(X, ctx.frame, g).matrix
        yield ctx.measure(f"s_relation.{name}", V_kosmann - (V_natural - S.components))
        lowered = S.lowered(g)
        yield ctx.measure(f"s_symmetry.{name}", lowered - lowered.T)


@kosmann_suite.check("decomposition")
def decomposition(ctx):
    """𝓛_X = L_X + S_X on the tensor pool."""
    g = ctx.frame_metric
    for name, X in ctx.vectors.items():
        V = kosmann_lift(X, ctx.frame, g)
        S = s_tensor(X, g, ctx.connection).components
        residuals = [
            generalized_lie_derivative(X, V, field).components
            - lie_derivative_frame(X, field).components
            - degenerate_action(S, field).components
            for field in ctx.tensor_pool
        ]
        yield ctx.measure_many(f"decomposition.{name}", residuals)


@kosmann_suite.check("killing")
def killing(ctx):
    g = ctx.frame_metric
    for name in ctx.scenario.killing:
        X = ctx.vectors[name]
        yield ctx.measure(
            f"killing.{name}", s_tensor(X, g, ctx.connection).components, KILLING_THRESHOLD
        )
        V = kosmann_lift(X, ctx.frame, g)
        residuals = [
            generalized_lie_derivative(X, V, field).components - lie_derivative_frame(X, field).components
            for field in ctx.killing_pool
        ]
        yield ctx.measure_many(f"killing_lift.{name}", residuals)
    for name in ctx.scenario.non_killing:
        S = s_tensor(ctx.vectors[name], g, ctx.connection).components
        yield ctx.measure_above(f"non_killing.{name}", S, NON_KILLING_THRESHOLD)


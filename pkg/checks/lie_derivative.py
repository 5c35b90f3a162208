from __future__ import annotations

import numpy as np

from checks.utils import Suite
from expr import DIMENSION
from geometry import Frame
from lie import (
    change_frame,
    contract,
    dual_frame_derivative,
    generalized_lie_derivative,
    kosmann_lift,
    lie_derivative_frame,
    lie_derivative_holonomic,
    natural_lift,
    natural_lift_covariant,
    tensor_product,
)

lie_suite = Suite("lie")


@lie_suite.check("frame_equivalence")
def frame_equivalence(ctx):
    for name, X in ctx.vectors.items():
        X_hol = ctx.holonomic_vectors[name]
        residuals = []
        for field, framed in zip(ctx.holonomic_pool, ctx.tensor_pool):
            via_coordinates = change_frame(lie_derivative_holonomic(X_hol, field), ctx.frame)
            residuals.append(via_coordinates.components - lie_derivative_frame(X, framed).components)
        yield ctx.measure_many(f"frame_equivalence.{name}", residuals, ctx.tolerances.identity * 10)


@lie_suite.check("holonomic_reduction")
def holonomic_reduction(ctx):
    X = ctx.holonomic_vectors[ctx.scenario.primary]
    residuals = [
        lie_derivative_frame(X, field).components - lie_derivative_holonomic(X, field).components
        for field in ctx.holonomic_pool
    ]
    yield ctx.measure_many(f"holonomic_reduction.{X.name}", residuals)


@lie_suite.check("dual_frame_derivative")
def dual_frame(ctx):
    f: Frame = ctx.frame
    c = f.commutation
    residuals = [dual_frame_derivative(f, i) + c[:, i, :] for i in range(DIMENSION)]
    yield ctx.measure_many("dual_frame_derivative", residuals)


@lie_suite.check("natural_lift")
def natural(ctx):
    for name, X in ctx.vectors.items():
        V = natural_lift(X, ctx.frame, ctx.frame_metric)
        residuals = [
            generalized_lie_derivative(X, V, field).components - lie_derivative_frame(X, field).components
            for field in ctx.tensor_pool
        ]
        yield ctx.measure_many(f"natural_lift.{name}", residuals)
        yield ctx.measure(
            f"natural_covariant.{name}", V.matrix - natural_lift_covariant(X, ctx.connection).matrix
        )


@lie_suite.check("leibniz")
def leibniz(ctx):
    X = ctx.vectors[ctx.scenario.primary]
    first, second = ctx.tensor_pool[-2:]
    product = tensor_product(first, second)
    V = kosmann_lift(X, ctx.frame, ctx.frame_metric)
    derivations = {
        "natural": lambda field: lie_derivative_frame(X, field),
        "kosmann": lambda field: generalized_lie_derivative(X, V, field),
    }
    for label, derive in derivations.items():
        expected = tensor_product(derive(first), second).components + tensor_product(first, derive(second)).components
        yield ctx.measure(f"leibniz.{label}.{X.name}", derive(product).components - expected)


@lie_suite.check("contraction")
def contraction(ctx):
    X = ctx.vectors[ctx.scenario.primary]
    mixed = [field for field in ctx.tensor_pool if field.upper and field.lower]
    V = kosmann_lift(X, ctx.frame, ctx.frame_metric)
    derivations = {
        "natural": lambda field: lie_derivative_frame(X, field),
        "kosmann": lambda field: generalized_lie_derivative(X, V, field),
    }
    for label, derive in derivations.items():
        residuals = [
            np.asarray(derive(contract(field, 0, 0)).components - contract(derive(field), 0, 0).components)
            for field in mixed
        ]
        yield ctx.measure_many(f"contraction.{label}.{X.name}", residuals)


@lie_suite.check("bracket")
def bracket_in_coordinates(ctx):
    """[X, Y] in the frame agrees with the coordinate bracket for every declared pair."""
    for a, b in ctx.scenario.pairs:
        via_coordinates = change_frame(
            lie_derivative_holonomic(ctx.holonomic_vectors[a], ctx.holonomic_vectors[b]), ctx.frame
        )
        in_frame = lie_derivative_frame(ctx.vectors[a], ctx.vectors[b])
        yield ctx.measure(f"bracket.{a}+{b}", via_coordinates.components - in_frame.components)


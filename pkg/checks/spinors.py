from __future__ import annotations

import numpy as np

from checks.utils import Suite
from expr import DIMENSION, Point, total
from geometry import HOLONOMIC, MINKOWSKI, spin_connection
from lie import KOSMANN, generalized_lie_derivative, kosmann_lift
from models import CheckResult
from spin import (
    SPINOR,
    SpinTensorField,
    conjugate_block_direct,
    covariant_derivative_spin,
    equivariance_defect,
    exponential_consistency,
    ivw_in_frame,
    kosmann_lie_spin,
    kosmann_lie_spin_split,
    metric_field,
    random_spin_tensor_field,
    spin_degenerate_diff,
    spin_lift_W,
    spin_lift_W_covariant,
    spin_metric_field,
    spin_tensor_product,
    spin_to_lorentz,
    spin_types,
    trace_defect,
    transform_spin_connection,
)

ROUNDING = 1e-12
HOMOMORPHISM_TOLERANCE = 1e-10
BOOST_RAPIDITY = 0.7
ROTATION_ANGLE = 0.9
MIN_SLOPE = 1.8
LEIBNIZ_PAIRS = 3

spin_suite = Suite("spin", variants=(KOSMANN,))


@spin_suite.check("lift")
def lift(ctx):
    spin = ctx.spin
    for name, X in ctx.vectors.items():
        lifted = spin_lift_W(X, spin, ctx.variant)
        lowered = lifted.lowered(spin.d)
        yield ctx.measure(f"w_symmetry.{name}", lowered - lowered.T)
        yield ctx.measure(f"w_trace.{name}", trace_defect(lifted, spin.d), ROUNDING)
        yield ctx.measure(f"equivariance.{name}", equivariance_defect(lifted, spin))
        yield ctx.measure(f"w_covariant.{name}", lifted.W - spin_lift_W_covariant(X, spin))


@spin_suite.check("degenerate")
def degenerate(ctx):
    spin = ctx.spin
    A = spin.spin_connection
    g = spin.metric
    for name, X in ctx.vectors.items():
        blocks = spin_degenerate_diff(X, spin)
        yield ctx.measure(f"conjugate_block.{name}", conjugate_block_direct(X, spin) - blocks.conjugate)
        lowered = np.empty((DIMENSION, DIMENSION), dtype=object)
        for i in range(DIMENSION):
            for j in range(DIMENSION):
                lowered[i, j] = total(blocks.spatial[r, i] * g.lower[r, j] for r in range(DIMENSION))
        yield ctx.measure(f"spatial_block_skew.{name}", lowered + lowered.T)
        W = spin_lift_W(X, spin, ctx.variant).W
        along = np.empty((SPINOR, SPINOR), dtype=object)
        for i in range(SPINOR):
            for j in range(SPINOR):
                along[i, j] = total(X.components[m] * A.components[i, m, j] for m in range(DIMENSION))
        yield ctx.measure(f"spinor_block.{name}", blocks.spinor + W + along)


@spin_suite.check("two_path")
def two_path(ctx):
    """Block form of the spin derivative against ∇_X + S_X on the spin pool."""
    spin = ctx.spin
    for name, X in ctx.vectors.items():
        lifted = spin_lift_W(X, spin, ctx.variant)
        blocks = spin_degenerate_diff(X, spin)
        residuals = [
            kosmann_lie_spin(X, Y, lifted.V, lifted).components - kosmann_lie_spin_split(X, Y, spin, blocks).components
            for Y in ctx.spin_pool
        ]
        yield ctx.measure_many(f"two_path.{name}", residuals)


@spin_suite.check("reduction")
def reduction(ctx):
    """On purely spatial fields the spinor formula is the tensor one."""
    spin = ctx.spin
    X = ctx.vectors[ctx.scenario.primary]
    lifted = spin_lift_W(X, spin, ctx.variant)
    V = kosmann_lift(X, ctx.frame, spin.metric)
    residuals = []
    for field in ctx.tensor_pool:
        as_spin = SpinTensorField((0, 0, 0, 0, field.upper, field.lower), ctx.frame, field.components, field.name)
        residuals.append(
            kosmann_lie_spin(X, as_spin, lifted.V, lifted).components
            - generalized_lie_derivative(X, V, field).components
        )
    yield ctx.measure_many(f"reduction.{X.name}", residuals)


@spin_suite.check("conjugation")
def conjugation(ctx):
    spin = ctx.spin
    X = ctx.vectors[ctx.scenario.primary]
    lifted = spin_lift_W(X, spin, ctx.variant)
    residuals = [
        kosmann_lie_spin(X, Y.conjugate(), lifted.V, lifted).components
        - kosmann_lie_spin(X, Y, lifted.V, lifted).conjugate().components
        for Y in ctx.spin_pool
    ]
    yield ctx.measure_many(f"conjugation.{X.name}", residuals)


@spin_suite.check("leibniz")
def leibniz(ctx):
    """Products of small random fields, each factor of at most two indices."""
    spin = ctx.spin
    X = ctx.vectors[ctx.scenario.primary]
    lifted = spin_lift_W(X, spin, ctx.variant)

    def derive(Y):
        return kosmann_lie_spin(X, Y, lifted.V, lifted)

    types = [counts for counts in spin_types(2) if sum(counts) > 0]
    rng = ctx.rng("spin_pairs")
    residuals = []
    for _ in range(LEIBNIZ_PAIRS):
        first, second = (
            random_spin_tensor_field(rng, types[k], ctx.frame, degree=1) for k in rng.choice(len(types), size=2)
        )
        product = derive(spin_tensor_product(first, second)).components
        expected = (
            spin_tensor_product(derive(first), second).components
            + spin_tensor_product(first, derive(second)).components
        )
        residuals.append(product - expected)
    yield ctx.measure_many(f"leibniz.{X.name}", residuals)


@spin_suite.check("parallel")
def parallel(ctx):
    """∇g, ∇d and ∇G vanish in the canonical pair."""
    spin = ctx.spin
    A = spin.spin_connection
    fields = {
        "nabla_g": metric_field(ctx.frame, spin.metric),
        "nabla_d": spin_metric_field(ctx.frame, spin.d),
        "nabla_G": spin.G.as_field(ctx.frame),
    }
    for label, field in fields.items():
        yield ctx.measure(label, covariant_derivative_spin(field, spin.connection, A).components)
    trace = np.array([total(A.components[i, r, i] for i in range(SPINOR)) for r in range(DIMENSION)], dtype=object)
    yield ctx.measure("spin_connection_trace", trace)


@spin_suite.check("general_pair")
def general_pair(ctx):
    """The spin connection rebuilt in the chart frame, with G no longer constant."""
    spin = ctx.spin
    g_hol = ctx.holonomic_metric
    G_hol = ivw_in_frame(spin.G, ctx.frame, HOLONOMIC, g_hol, spin.d)
    A_hol = spin_connection(ctx.holonomic_connection, HOLONOMIC, G_hol, spin.d)
    expected = transform_spin_connection(spin.spin_connection, HOLONOMIC)
    yield ctx.measure("general_pair.connection", A_hol.components - expected.components)
    field = SpinTensorField((1, 0, 1, 0, 0, 1), HOLONOMIC, G_hol.components, "G")
    nabla = covariant_derivative_spin(field, ctx.holonomic_connection, A_hol)
    yield ctx.measure("general_pair.nabla_G", nabla.components)


@spin_suite.check("homomorphism")
def homomorphism(ctx):
    boost, rotation = np.cosh(BOOST_RAPIDITY), np.cos(ROTATION_ANGLE)
    sinh, sin = np.sinh(BOOST_RAPIDITY), np.sin(ROTATION_ANGLE)
    cases = {
        "identity": (np.eye(SPINOR), np.eye(DIMENSION)),
        "boost": (
            np.diag([np.exp(BOOST_RAPIDITY / 2), np.exp(-BOOST_RAPIDITY / 2)]),
            np.array([[boost, 0, 0, sinh], [0, 1, 0, 0], [0, 0, 1, 0], [sinh, 0, 0, boost]]),
        ),
        "rotation": (
            np.diag([np.exp(0.5j * ROTATION_ANGLE), np.exp(-0.5j * ROTATION_ANGLE)]),
            np.array([[1, 0, 0, 0], [0, rotation, sin, 0], [0, -sin, rotation, 0], [0, 0, 0, 1]]),
        ),
    }
    for label, (matrix, expected) in cases.items():
        error = float(np.abs(spin_to_lorentz(matrix) - expected).max())
        yield ctx.constant(f"homomorphism.{label}", error, error < HOMOMORPHISM_TOLERANCE)

    rng = ctx.rng("spin")
    matrix = rng.normal(size=(SPINOR, SPINOR)) + 1j * rng.normal(size=(SPINOR, SPINOR))
    matrix = matrix / np.sqrt(np.linalg.det(matrix))
    image = spin_to_lorentz(matrix)
    error = float(np.abs(image.T @ MINKOWSKI @ image - MINKOWSKI).max())
    yield ctx.constant("homomorphism.lorentz", error, error < HOMOMORPHISM_TOLERANCE * max(1.0, np.abs(image).max() ** 2))


@spin_suite.check("exponential")
def exponential(ctx):
    """exp(εW) maps to exp(εV) at the first sample point."""
    spin = ctx.spin
    point = Point(tuple(ctx.points[0]))
    for name, X in ctx.vectors.items():
        lifted = spin_lift_W(X, spin, ctx.variant)
        V = ctx.evaluator.array(lifted.V.matrix)[0]
        W = ctx.evaluator.array(lifted.W)[0]
        report = exponential_consistency(V.real, W)
        error = max(report.errors.values())
        slope = report.slope
        passed = report.at_rounding or (slope is not None and slope >= MIN_SLOPE)
        detail = "exact" if slope is None else f"slope={slope:.3f}"
        yield CheckResult("", f"exponential.{name}", error, point, passed, detail=detail)

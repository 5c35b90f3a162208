from __future__ import annotations

import numpy as np
import pytest
from numpy.random import PCG64, Generator
from numpy.testing import assert_allclose

from expr import differentiate, parse
from geometry import HOLONOMIC, FrameMismatchError, christoffel_frame, christoffel_holonomic, frame_metric, zeros
from helpers import CARTESIAN, SPHERICAL, expressions
from lie import (
    DEFAULT_EPSILONS,
    KOSMANN,
    FlowError,
    LieError,
    LiftCoefficients,
    TensorField,
    change_frame,
    commutator_defect,
    contract,
    dual_frame_derivative,
    flow_oracle_lie,
    generalized_lie_derivative,
    is_killing,
    isometry_defect,
    kosmann_lift,
    kosmann_lift_from_parts,
    lie_derivative_frame,
    lie_derivative_holonomic,
    natural_lift,
    natural_lift_covariant,
    random_tensor_field,
    s_tensor,
    tensor_product,
    vector_field,
)


def cartesian_vector(*components):
    return vector_field(expressions(list(components), CARTESIAN))


def spherical_vector(*components, frame=HOLONOMIC):
    return vector_field(expressions(list(components), SPHERICAL), frame)


@pytest.fixture(scope="module")
def flat(minkowski):
    return frame_metric(minkowski, HOLONOMIC), christoffel_holonomic(minkowski)


@pytest.fixture(scope="module")
def tetrad(spherical_metric, spherical_tetrad):
    g = frame_metric(spherical_metric, spherical_tetrad)
    return g, christoffel_frame(g)


@pytest.fixture(scope="module")
def random_fields():
    rng = Generator(PCG64(11))
    return random_tensor_field(rng, 1, 1, HOLONOMIC), random_tensor_field(rng, 0, 2, HOLONOMIC)


def metric_field(g):
    return TensorField(0, 2, g.frame, g.lower, "g")


def test_translation_only_transports(random_fields, cartesian_points, numeric):
    X = cartesian_vector("1", "0", "0", "0")
    for Y in random_fields:
        derived = lie_derivative_holonomic(X, Y).components
        expected = np.vectorize(lambda e: differentiate(e, 0), otypes=[object])(Y.components)
        assert np.abs(numeric(derived - expected, cartesian_points)).max() < 1e-14


def test_rotation_preserves_flat_metric(flat, cartesian_points, numeric):
    g, _ = flat
    X = cartesian_vector("0", "-y", "x", "0")
    derived = lie_derivative_holonomic(X, metric_field(g))
    assert np.abs(numeric(derived.components, cartesian_points)).max() == 0


def test_holonomic_frame_formula_reduces(random_fields, cartesian_points, numeric):
    X = cartesian_vector("t^2", "x", "y*z", "0")
    for Y in random_fields:
        residual = lie_derivative_frame(X, Y).components - lie_derivative_holonomic(X, Y).components
        assert np.abs(numeric(residual, cartesian_points)).max() < 1e-13


def test_dual_frame_derivative(spherical_tetrad, spherical_points, numeric):
    c = spherical_tetrad.commutation
    for i in range(4):
        residual = dual_frame_derivative(spherical_tetrad, i) + c[:, i, :]
        assert np.abs(numeric(residual, spherical_points)).max() < 1e-12


def test_frame_equivalence_in_spherical_tetrad(spherical_tetrad, random_fields, spherical_points, numeric):
    X = spherical_vector("t^2", "r", "sin(theta)", "0")
    X_frame = change_frame(X, spherical_tetrad)
    for Y in random_fields:
        via_coordinates = change_frame(lie_derivative_holonomic(X, Y), spherical_tetrad)
        in_frame = lie_derivative_frame(X_frame, change_frame(Y, spherical_tetrad))
        residual = numeric(via_coordinates.components - in_frame.components, spherical_points)
        assert np.abs(residual).max() < 1e-8


def test_natural_lift_is_the_jacobian_in_coordinates(cartesian_points, numeric):
    X = cartesian_vector("t^2", "x", "0", "y*z")
    V = natural_lift(X).matrix
    expected = np.array(
        [[differentiate(X.components[i], j) for j in range(4)] for i in range(4)], dtype=object
    )
    assert np.abs(numeric(V - expected, cartesian_points)).max() == 0


def test_constant_field_has_vanishing_lifts(flat, cartesian_points, numeric):
    g, connection = flat
    X = cartesian_vector("1", "2", "-1", "0.5")
    for V in (natural_lift(X), kosmann_lift(X, HOLONOMIC, g)):
        assert np.abs(numeric(V.matrix, cartesian_points)).max() == 0
    assert np.abs(numeric(s_tensor(X, g, connection).components, cartesian_points)).max() == 0


def test_zero_field_has_vanishing_kosmann_lift(flat, cartesian_points, numeric):
    g, connection = flat
    X = cartesian_vector("0", "0", "0", "0")
    assert np.abs(numeric(kosmann_lift(X, HOLONOMIC, g).matrix, cartesian_points)).max() == 0
    assert np.abs(numeric(s_tensor(X, g, connection).components, cartesian_points)).max() == 0


def test_natural_lift_covariant_form(spherical_tetrad, tetrad, spherical_points, numeric):
    _, connection = tetrad
    X = spherical_vector("t^2", "r", "sin(theta)", "0", frame=spherical_tetrad)
    residual = natural_lift(X).matrix - natural_lift_covariant(X, connection).matrix
    assert np.abs(numeric(residual, spherical_points)).max() < 1e-10


def test_killing_field_lifts_coincide(flat, cartesian_points, numeric):
    g, _ = flat
    for components in (("0", "-y", "x", "0"), ("x", "t", "0", "0")):
        X = cartesian_vector(*components)
        residual = kosmann_lift(X, HOLONOMIC, g).matrix - natural_lift(X).matrix
        assert np.abs(numeric(residual, cartesian_points)).max() < 1e-14


def test_kosmann_lift_from_independent_parts(flat, cartesian_points, numeric):
    g, _ = flat
    X = cartesian_vector("t^2", "x", "0", "0")
    V = kosmann_lift(X, HOLONOMIC, g)
    residual = V.matrix - kosmann_lift_from_parts(X, g).matrix
    assert np.abs(numeric(residual, cartesian_points)).max() < 1e-12
    assert np.abs(numeric(isometry_defect(V, X, g), cartesian_points)).max() < 1e-12


def test_s_tensor_examples(flat, cartesian_points, numeric):
    g, connection = flat
    rotation = s_tensor(cartesian_vector("0", "-y", "x", "0"), g, connection)
    assert is_killing(rotation, cartesian_points)
    dilation = s_tensor(cartesian_vector("t", "x", "y", "z"), g, connection)
    values = numeric(dilation.components, cartesian_points)
    assert_allclose(values, np.broadcast_to(np.eye(4), values.shape), atol=1e-14)
    assert not is_killing(dilation, cartesian_points)


def test_s_tensor_lowered_is_symmetric(spherical_tetrad, tetrad, spherical_points, numeric):
    g, connection = tetrad
    X = spherical_vector("t^2", "r", "sin(theta)", "0", frame=spherical_tetrad)
    lowered = s_tensor(X, g, connection).lowered(g)
    assert np.abs(numeric(lowered - lowered.T, spherical_points)).max() < 1e-10


def test_transport_only_on_scalars(cartesian_points, numeric):
    X = cartesian_vector("1", "2", "0", "0")
    scalar = TensorField(0, 0, HOLONOMIC, np.array(parse("t*x^2", CARTESIAN), dtype=object))
    V = LiftCoefficients(zeros((4, 4)), KOSMANN, HOLONOMIC)
    derived = generalized_lie_derivative(X, V, scalar).components
    t, x = cartesian_points[:, 0], cartesian_points[:, 1]
    assert_allclose(numeric(derived, cartesian_points), x**2 + 4 * t * x, rtol=1e-13)


def test_kosmann_derivative_annihilates_metric(spherical_metric, spherical_points, numeric):
    g = frame_metric(spherical_metric, HOLONOMIC)
    X = spherical_vector("t^2", "r", "sin(theta)", "0")
    V = kosmann_lift(X, HOLONOMIC, g)
    derived = generalized_lie_derivative(X, V, metric_field(g))
    assert np.abs(numeric(derived.components, spherical_points)).max() < 1e-9
    assert np.abs(numeric(isometry_defect(V, X, g), spherical_points)).max() < 1e-9


def test_natural_derivative_of_metric_vanishes_for_killing_fields(spherical_metric, spherical_points, numeric):
    g = frame_metric(spherical_metric, HOLONOMIC)
    X = spherical_vector("0", "0", "-sin(phi)", "-cos(theta)*cos(phi)/sin(theta)")
    derived = generalized_lie_derivative(X, natural_lift(X), metric_field(g))
    assert np.abs(numeric(derived.components, spherical_points)).max() < 1e-9


@pytest.mark.parametrize("variant", ["natural", "kosmann"])
def test_leibniz_rule(variant, spherical_tetrad, tetrad, random_fields, spherical_points, numeric):
    g, _ = tetrad
    X = spherical_vector("t*r", "r^2", "theta*t", "phi*r", frame=spherical_tetrad)
    first, second = (change_frame(field, spherical_tetrad) for field in random_fields)
    V = natural_lift(X) if variant == "natural" else kosmann_lift(X, spherical_tetrad, g)

    def derive(field):
        return generalized_lie_derivative(X, V, field)

    expected = tensor_product(derive(first), second).components + tensor_product(first, derive(second)).components
    residual = derive(tensor_product(first, second)).components - expected
    assert np.abs(numeric(residual, spherical_points)).max() < 1e-9


def test_derivative_commutes_with_contraction(spherical_tetrad, tetrad, random_fields, spherical_points, numeric):
    g, _ = tetrad
    X = spherical_vector("t^2", "r", "sin(theta)", "0", frame=spherical_tetrad)
    field = change_frame(random_fields[0], spherical_tetrad)
    for V in (natural_lift(X), kosmann_lift(X, spherical_tetrad, g)):
        residual = (
            generalized_lie_derivative(X, V, contract(field, 0, 0)).components
            - contract(generalized_lie_derivative(X, V, field), 0, 0).components
        )
        assert np.abs(numeric(np.asarray(residual, dtype=object), spherical_points)).max() < 1e-9


def test_commutator_for_boost_and_nonkilling_field(flat, random_fields, cartesian_points, numeric):
    g, connection = flat
    boost = cartesian_vector("z", "0", "0", "t")
    squared = cartesian_vector("t^2", "0", "0", "0")
    report = commutator_defect(boost, squared, random_fields, g, connection)
    for defect in report.operator_defects:
        assert np.abs(numeric(defect.components, cartesian_points)).max() < 1e-8
    assert np.abs(numeric(report.s_identity, cartesian_points)).max() < 1e-8
    assert np.abs(numeric(report.s_commutator, cartesian_points)).max() == 0


def test_commutator_for_killing_pair(flat, random_fields, cartesian_points, numeric):
    g, connection = flat
    rotation = cartesian_vector("0", "-y", "x", "0")
    boost = cartesian_vector("x", "t", "0", "0")
    report = commutator_defect(rotation, boost, random_fields, g, connection)
    assert np.abs(numeric(report.s_commutator, cartesian_points)).max() == 0
    for defect in report.operator_defects:
        assert np.abs(numeric(defect.components, cartesian_points)).max() < 1e-9


def test_commutator_of_field_with_itself(flat, random_fields, cartesian_points, numeric):
    g, connection = flat
    X = cartesian_vector("t*x", "y^2", "x*z", "t^2")
    report = commutator_defect(X, X, random_fields, g, connection)
    for defect in report.operator_defects:
        assert np.abs(numeric(defect.components, cartesian_points)).max() < 1e-12


def test_flow_oracle_translation_is_exact(cartesian_points):
    X = cartesian_vector("1", "0", "0", "0")
    Y = TensorField(1, 1, HOLONOMIC, expressions([["1", "2", "0", "0"]] + [["0", "0", "3", "-1"]] * 3, CARTESIAN))
    report = flow_oracle_lie(X, Y, cartesian_points[:4], DEFAULT_EPSILONS)
    assert report.errors[1e-2] < 1e-8
    assert report.slope is None


def test_flow_oracle_rotation_preserves_metric(flat, cartesian_points):
    g, _ = flat
    X = cartesian_vector("0", "-y", "x", "0")
    report = flow_oracle_lie(X, metric_field(g), cartesian_points[:4], DEFAULT_EPSILONS)
    assert max(report.errors.values()) < 1e-6
    assert report.slope is None or 1.8 <= report.slope <= 2.2


def test_flow_oracle_matches_formula_for_covector(cartesian_points):
    X = cartesian_vector("t^2", "x", "0", "0")
    covector = TensorField(0, 1, HOLONOMIC, expressions(["0", "1", "0", "0"], CARTESIAN))
    report = flow_oracle_lie(X, covector, cartesian_points[:8], DEFAULT_EPSILONS)
    assert report.errors[1e-3] <= 1e-4
    assert 1.8 <= report.slope <= 2.2


def test_flow_oracle_matches_formula_for_metric(flat, cartesian_points):
    g, _ = flat
    X = cartesian_vector("t^2", "x", "0", "0")
    report = flow_oracle_lie(X, metric_field(g), cartesian_points[:8], DEFAULT_EPSILONS)
    assert report.errors[1e-3] <= 1e-4


def test_flow_leaving_the_region_fails(cartesian_points):
    X = cartesian_vector("1", "0", "0", "0")
    Y = TensorField(1, 0, HOLONOMIC, expressions(["t", "0", "0", "0"], CARTESIAN))
    point = cartesian_points[:1]
    with pytest.raises(FlowError, match="left the sample region"):
        flow_oracle_lie(X, Y, point, DEFAULT_EPSILONS, region=(point[0] - 1e-4, point[0] + 1e-4))


def test_frame_and_shape_errors(spherical_tetrad):
    X = spherical_vector("1", "0", "0", "0")
    Y = change_frame(spherical_vector("0", "1", "0", "0"), spherical_tetrad)
    with pytest.raises(FrameMismatchError):
        lie_derivative_holonomic(X, Y)
    with pytest.raises(FrameMismatchError):
        lie_derivative_frame(X, Y)
    with pytest.raises(LieError):
        TensorField(1, 0, HOLONOMIC, zeros((4, 4)))
    with pytest.raises(LieError):
        lie_derivative_frame(TensorField.zeros(0, 1, HOLONOMIC), X)

"""
Lie derivatives of tensor fields, lifting coefficients and the S_X tensor.

Tensor components are stored upper indices first, then lower indices.
A lifting is represented only by its coefficient matrix V[i, j] = V^i_j;
the generalized derivative is

    𝓛_X Y = Σ_m X^m Υ_m(Y) + Σ_lower V^k_j Y_{..k..} − Σ_upper V^i_k Y^{..k..}

which is the ordinary Lie derivative for the natural V and the
Kosmann-Lie derivative for the Kosmann V.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from expr import DIMENSION, Evaluator, Expr, differentiate, random_polynomial, total
from geometry import (
    HOLONOMIC,
    ConnectionCoefficients,
    Frame,
    FrameMetric,
    FrameMismatchError,
    act_on_index,
    covariant_derivative_tensor,
    expr_array,
    matmul,
    zeros,
)

log = logging.getLogger(__name__)

NATURAL = "natural"
KOSMANN = "kosmann"
VARIANTS = (KOSMANN, NATURAL)


class LieError(Exception):
    pass


class FlowError(LieError):
    pass


@dataclass(frozen=True, eq=False)
class TensorField:
    upper: int
    lower: int
    frame: Frame
    components: np.ndarray
    name: str = ""

    def __post_init__(self):
        components = expr_array(self.components)
        expected = (DIMENSION,) * (self.upper + self.lower)
        if components.shape != expected:
            raise LieError(f"type ({self.upper},{self.lower}) needs shape {expected}, got {components.shape}")
        object.__setattr__(self, "components", components)

    @property
    def rank(self) -> int:
        return self.upper + self.lower

    @property
    def type(self) -> tuple[int, int]:
        return self.upper, self.lower

    @classmethod
    def zeros(cls, upper: int, lower: int, frame: Frame, name: str = "") -> "TensorField":
        return cls(upper, lower, frame, zeros((DIMENSION,) * (upper + lower)), name)

    def with_components(self, components: np.ndarray) -> "TensorField":
        return TensorField(self.upper, self.lower, self.frame, components, self.name)

    def __sub__(self, other: "TensorField") -> "TensorField":
        _same_frame(self, other)
        if self.type != other.type:
            raise LieError(f"cannot subtract type {other.type} from {self.type}")
        return self.with_components(self.components - other.components)

    def __add__(self, other: "TensorField") -> "TensorField":
        _same_frame(self, other)
        if self.type != other.type:
            raise LieError(f"cannot add type {other.type} to {self.type}")
        return self.with_components(self.components + other.components)

    def __repr__(self) -> str:
        label = self.name or "field"
        return f"<TensorField {label} ({self.upper},{self.lower}) in {self.frame.name}>"


def _same_frame(*fields) -> Frame:
    frame = fields[0].frame
    for other in fields[1:]:
        if other.frame is not frame:
            raise FrameMismatchError(f"fields in {frame.name} and {other.frame.name}")
    return frame


def vector_field(coordinate_components: Sequence[Expr], frame: Frame = HOLONOMIC, name: str = "") -> TensorField:
    """A vector field given in coordinate components, expressed in `frame`."""
    components = expr_array(list(coordinate_components))
    if frame.is_holonomic:
        return TensorField(1, 0, frame, components, name)
    eta = frame.dual
    framed = [total(eta[m, i] * components[i] for i in range(DIMENSION)) for m in range(DIMENSION)]
    return TensorField(1, 0, frame, framed, name)


def change_frame(Y: TensorField, target: Frame) -> TensorField:
    if Y.frame is target:
        return Y
    if not Y.frame.is_holonomic:
        # back to coordinates first
        source = Y.frame
        components = Y.components
        for axis in range(Y.rank):
            matrix = source.vectors if axis < Y.upper else source.dual.T
            components = act_on_index(components, axis, matrix)
        Y = TensorField(Y.upper, Y.lower, HOLONOMIC, components, Y.name)
        if target.is_holonomic:
            return Y
    components = Y.components
    for axis in range(Y.rank):
        matrix = target.dual if axis < Y.upper else target.vectors.T
        components = act_on_index(components, axis, matrix)
    return TensorField(Y.upper, Y.lower, target, components, Y.name)


def tensor_product(a: TensorField, b: TensorField) -> TensorField:
    frame = _same_frame(a, b)
    shape = (DIMENSION,) * (a.rank + b.rank)
    out = np.empty(shape, dtype=object)
    for index in np.ndindex(shape):
        ua, ub = index[: a.upper], index[a.upper : a.upper + b.upper]
        la = index[a.upper + b.upper : a.upper + b.upper + a.lower]
        lb = index[a.upper + b.upper + a.lower :]
        out[index] = a.components[ua + la] * b.components[ub + lb]
    return TensorField(a.upper + b.upper, a.lower + b.lower, frame, out)


def contract(Y: TensorField, upper_slot: int, lower_slot: int) -> TensorField:
    if not (0 <= upper_slot < Y.upper and 0 <= lower_slot < Y.lower):
        raise LieError(f"cannot contract slots ({upper_slot},{lower_slot}) of type {Y.type}")
    axis_u, axis_l = upper_slot, Y.upper + lower_slot
    shape = (DIMENSION,) * (Y.rank - 2)
    out = np.empty(shape, dtype=object)
    for index in np.ndindex(shape):
        rest = list(index)
        terms = []
        for k in range(DIMENSION):
            full = rest[:axis_u] + [k] + rest[axis_u:]
            full = full[:axis_l] + [k] + full[axis_l:]
            terms.append(Y.components[tuple(full)])
        out[index] = total(terms)
    return TensorField(Y.upper - 1, Y.lower - 1, Y.frame, out)


def random_tensor_field(
    rng: np.random.Generator, upper: int, lower: int, frame: Frame, degree: int = 2, name: str = ""
) -> TensorField:
    shape = (DIMENSION,) * (upper + lower)
    out = np.empty(shape, dtype=object)
    for index in np.ndindex(shape):
        out[index] = random_polynomial(rng, degree)
    return TensorField(upper, lower, frame, out, name or f"random({upper},{lower})")


# ---------------------------------------------------------------------------
# Lie derivatives


def _transport(X: TensorField, Y: TensorField) -> np.ndarray:
    f = Y.frame
    out = np.empty(Y.components.shape, dtype=object)
    for index in np.ndindex(out.shape):
        out[index] = total(X.components[m] * f.derivative(Y.components[index], m) for m in range(DIMENSION))
    return out


def _check_vector(X: TensorField) -> None:
    if X.type != (1, 0):
        raise LieError(f"direction field must be a vector, got type {X.type}")


def _with_index_corrections(Y: TensorField, transported: np.ndarray, V: np.ndarray) -> np.ndarray:
    """transport + Σ_lower V^k_j Y_{..k..} − Σ_upper V^i_k Y^{..k..}"""
    result = transported
    for axis in range(Y.rank):
        if axis < Y.upper:
            result = result - act_on_index(Y.components, axis, V)
        else:
            result = result + act_on_index(Y.components, axis, V.T)
    return result


def lie_derivative_holonomic(X: TensorField, Y: TensorField) -> TensorField:
    _check_vector(X)
    if not (X.frame.is_holonomic and Y.frame.is_holonomic):
        raise FrameMismatchError("coordinate Lie derivative needs both fields in the holonomic frame")
    out = np.empty(Y.components.shape, dtype=object)
    for index in np.ndindex(out.shape):
        terms = [X.components[k] * differentiate(Y.components[index], k) for k in range(DIMENSION)]
        for p in range(Y.rank):
            for k in range(DIMENSION):
                moved = Y.components[index[:p] + (k,) + index[p + 1 :]]
                if p < Y.upper:
                    terms.append(-(differentiate(X.components[index[p]], k) * moved))
                else:
                    terms.append(differentiate(X.components[k], index[p]) * moved)
        out[index] = total(terms)
    return Y.with_components(out)


def lie_derivative_frame(X: TensorField, Y: TensorField) -> TensorField:
    """Lie derivative in an arbitrary frame through its commutation coefficients."""
    _check_vector(X)
    f = _same_frame(X, Y)
    c = f.commutation
    out = np.empty(Y.components.shape, dtype=object)
    for index in np.ndindex(out.shape):
        terms = [X.components[m] * f.derivative(Y.components[index], m) for m in range(DIMENSION)]
        for p in range(Y.rank):
            slot = index[p]
            for k in range(DIMENSION):
                moved = Y.components[index[:p] + (k,) + index[p + 1 :]]
                if p < Y.upper:
                    coefficient = f.derivative(X.components[slot], k) - total(
                        X.components[m] * c[slot, m, k] for m in range(DIMENSION)
                    )
                    terms.append(-(coefficient * moved))
                else:
                    coefficient = f.derivative(X.components[k], slot) - total(
                        X.components[m] * c[k, m, slot] for m in range(DIMENSION)
                    )
                    terms.append(coefficient * moved)
        out[index] = total(terms)
    return Y.with_components(out)


def bracket(X: TensorField, Y: TensorField) -> TensorField:
    """[X, Y] = L_X(Y) for vector fields."""
    _check_vector(Y)
    return lie_derivative_frame(X, Y)


def dual_frame_derivative(f: Frame, i: int) -> np.ndarray:
    """
    Frame components M[k, j] of L_{Υ_i}(η^k) = Σ_j M[k, j] η^j, computed
    from coordinate Lie derivatives of the dual covectors.
    """
    direction = TensorField(1, 0, HOLONOMIC, f.vectors[:, i])
    out = np.empty((DIMENSION, DIMENSION), dtype=object)
    for k in range(DIMENSION):
        covector = TensorField(0, 1, HOLONOMIC, f.dual[k, :])
        derived = lie_derivative_holonomic(direction, covector).components
        for j in range(DIMENSION):
            out[k, j] = total(derived[l] * f.vectors[l, j] for l in range(DIMENSION))
    return out


# ---------------------------------------------------------------------------
# Lifting coefficients


@dataclass(frozen=True, eq=False)
class LiftCoefficients:
    matrix: np.ndarray
    variant: str
    frame: Frame

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise LieError(f"unknown lifting variant {self.variant!r}")
        object.__setattr__(self, "matrix", expr_array(self.matrix))

    def lowered(self, g_frame: FrameMetric) -> np.ndarray:
        """V_ij = Σ_r V^r_i g_rj."""
        return _lower(self.matrix, g_frame.lower)


def _lower(matrix: np.ndarray, g: np.ndarray) -> np.ndarray:
    out = np.empty((DIMENSION, DIMENSION), dtype=object)
    for i in range(DIMENSION):
        for j in range(DIMENSION):
            out[i, j] = total(matrix[r, i] * g[r, j] for r in range(DIMENSION))
    return out


def _raise_other(matrix: np.ndarray, g_frame: FrameMetric) -> np.ndarray:
    """Σ_rs g^{is} M^r_s g_rj."""
    gu, gl = g_frame.upper, g_frame.lower
    out = np.empty((DIMENSION, DIMENSION), dtype=object)
    for i in range(DIMENSION):
        for j in range(DIMENSION):
            out[i, j] = total(
                gu[i, s] * matrix[r, s] * gl[r, j] for r in range(DIMENSION) for s in range(DIMENSION)
            )
    return out


def natural_lift(X: TensorField, f: Frame | None = None, g: FrameMetric | None = None) -> LiftCoefficients:
    """V^i_j = L_{Υ_j}(X^i) − Σ_m X^m c^i_mj."""
    _check_vector(X)
    f = f or X.frame
    if X.frame is not f:
        raise FrameMismatchError(f"vector field is in {X.frame.name}, not {f.name}")
    c = f.commutation
    V = np.empty((DIMENSION, DIMENSION), dtype=object)
    for i in range(DIMENSION):
        for j in range(DIMENSION):
            V[i, j] = f.derivative(X.components[i], j) - total(
                X.components[m] * c[i, m, j] for m in range(DIMENSION)
            )
    return LiftCoefficients(V, NATURAL, f)


def natural_lift_covariant(X: TensorField, connection: ConnectionCoefficients) -> LiftCoefficients:
    """V^i_j = ∇_j X^i − Σ_m X^m Γ^i_mj."""
    nabla = covariant_derivative_tensor(X, connection).components
    gamma = connection.gamma
    V = np.empty((DIMENSION, DIMENSION), dtype=object)
    for i in range(DIMENSION):
        for j in range(DIMENSION):
            V[i, j] = nabla[i, j] - total(X.components[m] * gamma[i, m, j] for m in range(DIMENSION))
    return LiftCoefficients(V, NATURAL, X.frame)


def kosmann_lift(X: TensorField, f: Frame | None, g: FrameMetric) -> LiftCoefficients:
    """
    Kosmann lifting coefficients in an arbitrary frame:

        V^i_j = −½ Σ g^{ir} X^m Υ_m(g_rj) − ½ Σ g^{is} Υ_s(X^r) g_rj + ½ Υ_j(X^i)
                − ½ Σ X^m c^i_mj + ½ Σ g^{is} X^m c^r_ms g_rj
    """
    _check_vector(X)
    f = f or X.frame
    if X.frame is not f or g.frame is not f:
        raise FrameMismatchError("vector field, metric and frame must agree")
    gu, gl, c, x = g.upper, g.lower, f.commutation, X.components
    n = DIMENSION
    transported_g = [[total(x[m] * f.derivative(gl[r, j], m) for m in range(n)) for j in range(n)] for r in range(n)]
    dX = [[f.derivative(x[r], s) for s in range(n)] for r in range(n)]
    # Xc[r][s] = Σ_m X^m c^r_ms
    Xc = [[total(x[m] * c[r, m, s] for m in range(n)) for s in range(n)] for r in range(n)]
    V = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            terms = [
                -total(gu[i, r] * transported_g[r][j] for r in range(n)),
                -total(gu[i, s] * dX[r][s] * gl[r, j] for r in range(n) for s in range(n)),
                dX[i][j],
                -Xc[i][j],
                total(gu[i, s] * Xc[r][s] * gl[r, j] for r in range(n) for s in range(n)),
            ]
            V[i, j] = total(terms) / 2
    return LiftCoefficients(V, KOSMANN, f)


def kosmann_lift_orthonormal(
    X: TensorField, g: FrameMetric, connection: ConnectionCoefficients
) -> LiftCoefficients:
    """V^i_j = −½ Σ g^{is} ∇_s X^r g_rj + ½ ∇_j X^i − Σ X^m Γ^i_mj (orthonormal frames)."""
    nabla = covariant_derivative_tensor(X, connection).components
    raised = _raise_other(nabla, g)
    gamma = connection.gamma
    V = np.empty((DIMENSION, DIMENSION), dtype=object)
    for i in range(DIMENSION):
        for j in range(DIMENSION):
            V[i, j] = (nabla[i, j] - raised[i, j]) / 2 - total(
                X.components[m] * gamma[i, m, j] for m in range(DIMENSION)
            )
    return LiftCoefficients(V, KOSMANN, X.frame)


def kosmann_symmetric_part(X: TensorField, g: FrameMetric) -> np.ndarray:
    """V^sym_ij = −½ Σ X^m Υ_m(g_ij)."""
    f = X.frame
    out = np.empty((DIMENSION, DIMENSION), dtype=object)
    for i in range(DIMENSION):
        for j in range(DIMENSION):
            out[i, j] = -total(X.components[m] * f.derivative(g.lower[i, j], m) for m in range(DIMENSION)) / 2
    return out


def kosmann_skew_part(X: TensorField, g: FrameMetric) -> np.ndarray:
    """Alternation of the natural coefficients lowered with g."""
    lowered = natural_lift(X).lowered(g)
    out = np.empty((DIMENSION, DIMENSION), dtype=object)
    for i in range(DIMENSION):
        for j in range(DIMENSION):
            out[i, j] = (lowered[i, j] - lowered[j, i]) / 2
    return out


def kosmann_lift_from_parts(X: TensorField, g: FrameMetric) -> LiftCoefficients:
    """Raise V_ij = V^sym_ij + V^skew_ij back to V^r_i = Σ_j V_ij g^{jr}."""
    sym, skew = kosmann_symmetric_part(X, g), kosmann_skew_part(X, g)
    V = np.empty((DIMENSION, DIMENSION), dtype=object)
    for r in range(DIMENSION):
        for i in range(DIMENSION):
            V[r, i] = total((sym[i, j] + skew[i, j]) * g.upper[j, r] for j in range(DIMENSION))
    return LiftCoefficients(V, KOSMANN, X.frame)


def lift(X: TensorField, g: FrameMetric, variant: str) -> LiftCoefficients:
    if variant == KOSMANN:
        return kosmann_lift(X, X.frame, g)
    if variant == NATURAL:
        return natural_lift(X, X.frame, g)
    raise LieError(f"unknown lifting variant {variant!r}")


def isometry_defect(V: LiftCoefficients, X: TensorField, g: FrameMetric) -> np.ndarray:
    """V_ij + V_ji + Σ X^m Υ_m(g_ij); zero for Kosmann liftings."""
    lowered = V.lowered(g)
    f = X.frame
    out = np.empty((DIMENSION, DIMENSION), dtype=object)
    for i in range(DIMENSION):
        for j in range(DIMENSION):
            out[i, j] = lowered[i, j] + lowered[j, i] + total(
                X.components[m] * f.derivative(g.lower[i, j], m) for m in range(DIMENSION)
            )
    return out


def generalized_lie_derivative(X: TensorField, V: LiftCoefficients, Y: TensorField) -> TensorField:
    _check_vector(X)
    if V.frame is not Y.frame:
        raise FrameMismatchError(f"lifting is in {V.frame.name}, field in {Y.frame.name}")
    _same_frame(X, Y)
    return Y.with_components(_with_index_corrections(Y, _transport(X, Y), V.matrix))


# ---------------------------------------------------------------------------
# S_X and degenerate differentiations


@dataclass(frozen=True, eq=False)
class STensor:
    components: np.ndarray
    frame: Frame

    def lowered(self, g: FrameMetric) -> np.ndarray:
        """S_ij = Σ_r S^r_i g_rj."""
        return _lower(self.components, g.lower)

    def as_field(self) -> TensorField:
        return TensorField(1, 1, self.frame, self.components)


def s_tensor(X: TensorField, g: FrameMetric, connection: ConnectionCoefficients) -> STensor:
    """S^i_j = ½ ∇_j X^i + ½ Σ g^{is} ∇_s X^r g_rj."""
    nabla = covariant_derivative_tensor(X, connection).components
    raised = _raise_other(nabla, g)
    return STensor((nabla + raised) / 2, X.frame)


def is_killing(S: STensor, points, tolerance: float = 1e-12) -> bool:
    return float(np.abs(Evaluator(points).array(S.components)).max()) < tolerance


def degenerate_action(S: np.ndarray, Y: TensorField) -> TensorField:
    """D_S(Y): +S on each upper index, −Sᵀ on each lower index."""
    result = zeros(Y.components.shape)
    for axis in range(Y.rank):
        if axis < Y.upper:
            result = result + act_on_index(Y.components, axis, S)
        else:
            result = result - act_on_index(Y.components, axis, S.T)
    return Y.with_components(result)


def operator_commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """[A, B] = A∘B − B∘A for operator-valued (1,1) fields."""
    return matmul(a, b) - matmul(b, a)


def s_defect(X: TensorField, Y: TensorField, SX: STensor, SY: STensor, SXY: STensor) -> np.ndarray:
    """S_{X,Y} = L_X(S_Y) − L_Y(S_X) − S_[X,Y] + [S_X, S_Y]."""
    return (
        lie_derivative_frame(X, SY.as_field()).components
        - lie_derivative_frame(Y, SX.as_field()).components
        - SXY.components
        + operator_commutator(SX.components, SY.components)
    )


@dataclass(frozen=True, eq=False)
class DefectReport:
    """Residual fields of the Kosmann-Lie commutation relation for one pair."""

    operator_defects: tuple[TensorField, ...]
    s_identity: np.ndarray
    s_commutator: np.ndarray = field(repr=False)


def commutator_defect(
    X: TensorField,
    Y: TensorField,
    testfields: Iterable[TensorField],
    g: FrameMetric,
    connection: ConnectionCoefficients,
) -> DefectReport:
    """
    [𝓛_X, 𝓛_Y]T − 𝓛_[X,Y]T + D([S_X, S_Y])T for each test field T, and
    S_{X,Y} + [S_X, S_Y] with S_{X,Y} assembled from its definition.
    """
    frame = _same_frame(X, Y)
    XY = bracket(X, Y)
    VX, VY, VXY = (kosmann_lift(Z, frame, g) for Z in (X, Y, XY))
    SX, SY, SXY = (s_tensor(Z, g, connection) for Z in (X, Y, XY))
    commutator = operator_commutator(SX.components, SY.components)
    defects = []
    for T in testfields:
        along_y = generalized_lie_derivative(Y, VY, T)
        along_x = generalized_lie_derivative(X, VX, T)
        defect = (
            generalized_lie_derivative(X, VX, along_y).components
            - generalized_lie_derivative(Y, VY, along_x).components
            - generalized_lie_derivative(XY, VXY, T).components
            + degenerate_action(commutator, T).components
        )
        defects.append(T.with_components(defect))
    s_identity = s_defect(X, Y, SX, SY, SXY) + commutator
    return DefectReport(tuple(defects), s_identity, commutator)


# ---------------------------------------------------------------------------
# Flow oracle

DEFAULT_EPSILONS = (1e-2, 5e-3, 2.5e-3, 1e-3)
SLOPE_EPSILONS = (1e-2, 5e-3, 2.5e-3)
FLOW_SUBSTEPS = 64
JACOBIAN_STEP = 2e-5


@dataclass(frozen=True, eq=False)
class OracleReport:
    """Flow-based estimates of L_X Y against the coordinate formula."""

    points: np.ndarray
    formula: np.ndarray
    estimates: dict[float, np.ndarray]

    @cached_property
    def errors(self) -> dict[float, float]:
        return {eps: float(np.abs(est - self.formula).max()) for eps, est in self.estimates.items()}

    def worst_point(self, eps: float) -> np.ndarray:
        deviation = np.abs(self.estimates[eps] - self.formula).reshape(len(self.points), -1).max(axis=1)
        return self.points[int(np.argmax(deviation))]

    @property
    def noise_floor(self) -> float:
        return 1e-6 * (1.0 + float(np.abs(self.formula).max()))

    @cached_property
    def slope(self) -> float | None:
        """Fitted log-log slope, or None when the errors sit at noise level."""
        usable = [
            (eps, err)
            for eps, err in self.errors.items()
            if eps in SLOPE_EPSILONS and err > self.noise_floor
        ]
        if len(usable) < 2:
            return None
        eps, err = np.log(np.array(usable)).T
        return float(np.polyfit(eps, err, 1)[0])


def _integrate(X: TensorField, starts: np.ndarray, times: np.ndarray, region) -> np.ndarray:
    """Fixed-step RK4 for dx/dτ = X(x), each row over its own time."""
    h = (times / FLOW_SUBSTEPS)[:, None]
    if np.any((np.abs(h) < np.finfo(float).tiny) & (times[:, None] != 0)):
        raise FlowError("integration step underflow")

    def velocity(state):
        return Evaluator(state).array(X.components).real

    state = starts.astype(float)
    for _ in range(FLOW_SUBSTEPS):
        k1 = velocity(state)
        k2 = velocity(state + h / 2 * k1)
        k3 = velocity(state + h / 2 * k2)
        k4 = velocity(state + h * k3)
        state = state + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if region is not None:
            low, high = region
            outside = np.flatnonzero(np.any((state < low) | (state > high), axis=1))
            if outside.size:
                raise FlowError(f"flow left the sample region at {tuple(np.round(state[outside[0]], 6))}")
    return state


def _flow_with_jacobian(X: TensorField, starts: np.ndarray, times: np.ndarray, region):
    """End points u(τ, x) and Jacobians ∂u^i/∂x^j by central differences."""
    n = starts.shape[0]
    step = JACOBIAN_STEP * np.eye(DIMENSION)
    offsets = np.concatenate([np.zeros((1, DIMENSION)), step, -step])
    rows = (offsets[:, None, :] + starts[None, :, :]).reshape(-1, DIMENSION)
    ends = _integrate(X, rows, np.tile(times, len(offsets)), region).reshape(len(offsets), n, DIMENSION)
    forward, backward = ends[1 : 1 + DIMENSION], ends[1 + DIMENSION :]
    jacobian = np.transpose((forward - backward) / (2 * JACOBIAN_STEP), (1, 2, 0))
    return ends[0], jacobian


def _apply_numeric(values: np.ndarray, axis: int, matrices: np.ndarray) -> np.ndarray:
    """out[p, .., a, ..] = Σ_b matrices[p, a, b] values[p, .., b, ..]."""
    moved = np.moveaxis(values, axis + 1, -1)
    result = np.einsum("pab,p...b->p...a", matrices, moved)
    return np.moveaxis(result, -1, axis + 1)


def flow_oracle_lie(
    X: TensorField,
    Y: TensorField,
    points,
    eps_list: Sequence[float] = DEFAULT_EPSILONS,
    region=None,
) -> OracleReport:
    """
    Estimate L_X Y at `points` from the flow of X.

    For each ε the flow is integrated backwards to y = u(−τ, x) for τ = ±ε,
    Y(y) is pushed forward with Φ(τ) on upper and Φ(−τ) on lower indices,
    and the central difference −(φ_ε(Y) − φ_{−ε}(Y)) / 2ε is returned.
    """
    _check_vector(X)
    if not (X.frame.is_holonomic and Y.frame.is_holonomic):
        raise FrameMismatchError("the flow oracle works in the holonomic frame")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    p = points.shape[0]
    if region is not None:
        region = tuple(np.asarray(bound, dtype=float) for bound in region)
    taus = np.array([sign * eps for eps in eps_list for sign in (1.0, -1.0)])

    starts = np.tile(points, (len(taus), 1))
    y, backward = _flow_with_jacobian(X, starts, np.repeat(-taus, p), region)
    _, forward = _flow_with_jacobian(X, y, np.repeat(taus, p), region)

    pushed = Evaluator(y).array(Y.components)
    for axis in range(Y.rank):
        if axis < Y.upper:
            pushed = _apply_numeric(pushed, axis, forward)
        else:
            pushed = _apply_numeric(pushed, axis, np.transpose(backward, (0, 2, 1)))
    pushed = pushed.reshape((len(taus), p) + Y.components.shape)

    estimates = {}
    for k, eps in enumerate(eps_list):
        estimates[float(eps)] = -(pushed[2 * k] - pushed[2 * k + 1]) / (2 * eps)
    formula = Evaluator(points).array(lie_derivative_holonomic(X, Y).components)
    log.debug("flow oracle for %s on %s at %d points", X.name, Y.name, p)
    return OracleReport(points, formula, estimates)

"""
Weyl spinors over an orthonormal tetrad.

Spinor indices run over 0..1. Spin-tensor components are stored in the
order: upper spinor, lower spinor, upper conjugate, lower conjugate,
upper spatial, lower spatial. The Infeld-van der Waerden field is kept as
`components[a, ā, m]` (type (1,0|1,0|0,1)) and its inverse as
`inverse[m, u, ū]`.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import expm

from expr import DIMENSION, Evaluator, Point, random_polynomial, total
from geometry import (
    MINKOWSKI,
    ConnectionCoefficients,
    Frame,
    FrameKind,
    FrameMetric,
    FrameMismatchError,
    SpinConnection,
    act_on_index,
    conjugate_array,
    constant_array,
    covariant_derivative_tensor,
    expr_array,
    spin_connection,
    zeros,
)
from lie import KOSMANN, NATURAL, LiftCoefficients, TensorField, lie_derivative_frame, lift, s_tensor

log = logging.getLogger(__name__)

SPINOR = 2

# PAULI[m] = σ_m, entries [a, ā]
PAULI = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
D_LOWER = np.array([[0, 1], [-1, 0]], dtype=complex)
D_UPPER = np.array([[0, -1], [1, 0]], dtype=complex)
# G^m_{uū} for the canonical pair
PAULI_INVERSE = np.einsum("nab,au,bv,nm->muv", PAULI, D_LOWER, D_LOWER.conj(), MINKOWSKI)

HOMOMORPHISM_TOLERANCE = 1e-12


class SpinError(Exception):
    pass


class VariantMismatchError(SpinError):
    pass


class HomomorphismError(SpinError):
    pass


class CanonicalPairError(SpinError):
    pass


# ---------------------------------------------------------------------------
# Constant fields


@dataclass(frozen=True, eq=False)
class SpinMetric:
    lower: np.ndarray
    upper: np.ndarray

    @cached_property
    def bar_lower(self) -> np.ndarray:
        return conjugate_array(self.lower)

    @cached_property
    def bar_upper(self) -> np.ndarray:
        return conjugate_array(self.upper)


@dataclass(frozen=True, eq=False)
class InfeldVanDerWaerden:
    components: np.ndarray
    inverse: np.ndarray

    def as_field(self, frame: Frame) -> "SpinTensorField":
        return SpinTensorField((1, 0, 1, 0, 0, 1), frame, self.components, "G")


def inverse_ivw(G: np.ndarray, d: SpinMetric, g_upper: np.ndarray) -> np.ndarray:
    """G^m_{uū} = Σ G^{aā}_n d_{au} d̄_{āū} g^{nm}."""
    d_bar = d.bar_lower
    out = np.empty((DIMENSION, SPINOR, SPINOR), dtype=object)
    for m in range(DIMENSION):
        for u in range(SPINOR):
            for ub in range(SPINOR):
                out[m, u, ub] = total(
                    G[a, ab, n] * d.lower[a, u] * d_bar[ab, ub] * g_upper[n, m]
                    for a in range(SPINOR)
                    for ab in range(SPINOR)
                    for n in range(DIMENSION)
                )
    return out


def canonical_constants() -> tuple[SpinMetric, InfeldVanDerWaerden]:
    d = SpinMetric(constant_array(D_LOWER), constant_array(D_UPPER))
    components = constant_array(np.transpose(PAULI, (1, 2, 0)))
    return d, InfeldVanDerWaerden(components, inverse_ivw(components, d, expr_array(MINKOWSKI)))


@dataclass(frozen=True)
class IvwIdentityReport:
    first: np.ndarray
    second: np.ndarray

    @property
    def first_residual(self) -> float:
        expected = 2 * np.einsum("au,bv->abuv", np.eye(SPINOR), np.eye(SPINOR))
        return float(np.abs(self.first - expected).max())

    @property
    def second_residual(self) -> float:
        return float(np.abs(self.second - 2 * np.eye(DIMENSION)).max())

    @property
    def exact(self) -> bool:
        return self.first_residual == 0.0 and self.second_residual == 0.0


def check_ivw_identities(G: InfeldVanDerWaerden, point: Point | None = None) -> IvwIdentityReport:
    """
    Σ_m G^{aā}_m G^m_{uū} = 2 δ^a_u δ^ā_ū and Σ_{aā} G^{aā}_m G^n_{aā} = 2 δ^n_m,
    evaluated at one point (the origin for constant fields).
    """
    evaluator = Evaluator([point.coords if point else (0.0,) * DIMENSION])
    up = evaluator.array(G.components)[0]
    down = evaluator.array(G.inverse)[0]
    first = np.einsum("abm,muv->abuv", up, down)
    second = np.einsum("abm,nab->mn", up, down)
    return IvwIdentityReport(first, second)


def ivw_in_frame(G: InfeldVanDerWaerden, tetrad: Frame, target: Frame, g: FrameMetric, d: SpinMetric) -> InfeldVanDerWaerden:
    """The tetrad's G re-expressed on the spatial index in another tangent frame."""
    if g.frame is not target:
        raise FrameMismatchError(f"metric is in {g.frame.name}, not {target.name}")
    transform = _frame_transform(tetrad, target)
    out = np.empty((SPINOR, SPINOR, DIMENSION), dtype=object)
    for a, ab, i in np.ndindex(out.shape):
        out[a, ab, i] = total(G.components[a, ab, k] * transform[k, i] for k in range(DIMENSION))
    return InfeldVanDerWaerden(out, inverse_ivw(out, d, g.upper))


def _frame_transform(tetrad: Frame, target: Frame) -> np.ndarray:
    """T[a, i]: tetrad components of the target frame vector Υ'_i."""
    out = np.empty((DIMENSION, DIMENSION), dtype=object)
    for a in range(DIMENSION):
        for i in range(DIMENSION):
            out[a, i] = total(tetrad.dual[a, l] * target.vectors[l, i] for l in range(DIMENSION))
    return out


def transform_spin_connection(A: SpinConnection, target: Frame) -> SpinConnection:
    transform = _frame_transform(A.frame, target)
    out = np.empty((SPINOR, DIMENSION, SPINOR), dtype=object)
    for i, r, j in np.ndindex(out.shape):
        out[i, r, j] = total(transform[a, r] * A.components[i, a, j] for a in range(DIMENSION))
    return SpinConnection(out, target)


# ---------------------------------------------------------------------------
# Spin-tensor fields

_BLOCKS = ("spinor_upper", "spinor_lower", "conjugate_upper", "conjugate_lower", "spatial_upper", "spatial_lower")


@dataclass(frozen=True, eq=False)
class SpinTensorField:
    """Field of type (ε,η|σ,ζ|e,f) given by `counts`."""

    counts: tuple[int, int, int, int, int, int]
    frame: Frame
    components: np.ndarray
    name: str = ""

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if len(counts) != 6 or min(counts) < 0:
            raise SpinError(f"spin-tensor type needs six non-negative counts, got {self.counts}")
        object.__setattr__(self, "counts", counts)
        components = expr_array(self.components)
        if components.shape != self.shape:
            raise SpinError(f"type {self.type_label} needs shape {self.shape}, got {components.shape}")
        object.__setattr__(self, "components", components)

    @property
    def shape(self) -> tuple[int, ...]:
        e, h, s, z, up, low = self.counts
        return (SPINOR,) * (e + h + s + z) + (DIMENSION,) * (up + low)

    @property
    def type_label(self) -> str:
        e, h, s, z, up, low = self.counts
        return f"({e},{h}|{s},{z}|{up},{low})"

    def axes(self, block: str) -> range:
        k = _BLOCKS.index(block)
        start = sum(self.counts[:k])
        return range(start, start + self.counts[k])

    def with_components(self, components: np.ndarray) -> "SpinTensorField":
        return SpinTensorField(self.counts, self.frame, components, self.name)

    def conjugate(self) -> "SpinTensorField":
        e, h, s, z, up, low = self.counts
        order = (
            list(self.axes("conjugate_upper"))
            + list(self.axes("conjugate_lower"))
            + list(self.axes("spinor_upper"))
            + list(self.axes("spinor_lower"))
            + list(self.axes("spatial_upper"))
            + list(self.axes("spatial_lower"))
        )
        components = conjugate_array(np.transpose(self.components, order))
        return SpinTensorField((s, z, e, h, up, low), self.frame, components, f"conj({self.name})")

    def __repr__(self) -> str:
        return f"<SpinTensorField {self.name or 'field'} {self.type_label} in {self.frame.name}>"


def spin_types(max_total: int = 3) -> Iterator[tuple[int, ...]]:
    for counts in itertools.product(range(max_total + 1), repeat=6):
        if sum(counts) <= max_total:
            yield counts


def random_spin_tensor_field(
    rng: np.random.Generator, counts: Sequence[int], frame: Frame, degree: int = 2, name: str = ""
) -> SpinTensorField:
    e, h, s, z, up, low = counts
    out = np.empty((SPINOR,) * (e + h + s + z) + (DIMENSION,) * (up + low), dtype=object)
    for index in np.ndindex(out.shape):
        out[index] = random_polynomial(rng, degree, complex_coefficients=True)
    label = name or "spin_" + "".join(str(c) for c in counts)
    return SpinTensorField(tuple(counts), frame, out, label)


def spin_tensor_product(a: SpinTensorField, b: SpinTensorField) -> SpinTensorField:
    """a⊗b; inside every index block the indices of `a` come first."""
    if a.frame is not b.frame:
        raise FrameMismatchError(f"{a!r} and {b!r} live in different frames")
    outer = np.asarray(np.multiply.outer(a.components, b.components), dtype=object)
    offset = a.components.ndim
    order = []
    for block in _BLOCKS:
        order.extend(a.axes(block))
        order.extend(offset + axis for axis in b.axes(block))
    counts = tuple(x + y for x, y in zip(a.counts, b.counts))
    return SpinTensorField(counts, a.frame, np.transpose(outer, order), f"{a.name}*{b.name}")


def metric_field(frame: Frame, g: FrameMetric) -> SpinTensorField:
    return SpinTensorField((0, 0, 0, 0, 0, 2), frame, g.lower, "g")


def spin_metric_field(frame: Frame, d: SpinMetric) -> SpinTensorField:
    return SpinTensorField((0, 2, 0, 0, 0, 0), frame, d.lower, "d")


def _block_action(Y: SpinTensorField, spinor: np.ndarray, conjugate: np.ndarray, spatial: np.ndarray) -> np.ndarray:
    """+M on every upper index and −Mᵀ on every lower index, per block."""
    matrices = {
        "spinor_upper": spinor,
        "spinor_lower": spinor,
        "conjugate_upper": conjugate,
        "conjugate_lower": conjugate,
        "spatial_upper": spatial,
        "spatial_lower": spatial,
    }
    result = zeros(Y.components.shape)
    for block, matrix in matrices.items():
        for axis in Y.axes(block):
            if block.endswith("upper"):
                result = result + act_on_index(Y.components, axis, matrix)
            else:
                result = result - act_on_index(Y.components, axis, matrix.T)
    return result


def _transport(X: TensorField, Y: SpinTensorField) -> np.ndarray:
    f = Y.frame
    out = np.empty(Y.components.shape, dtype=object)
    for index in np.ndindex(out.shape):
        out[index] = total(X.components[m] * f.derivative(Y.components[index], m) for m in range(DIMENSION))
    return out


# ---------------------------------------------------------------------------
# Canonical frame pair


@dataclass(frozen=True, eq=False)
class SpinStructure:
    """An orthonormal tetrad with its canonically associated spinor frame."""

    frame: Frame
    metric: FrameMetric
    connection: ConnectionCoefficients
    d: SpinMetric
    G: InfeldVanDerWaerden

    @cached_property
    def spin_connection(self) -> SpinConnection:
        return spin_connection(self.connection, self.frame, self.G, self.d)


def canonical_structure(frame: Frame, g: FrameMetric, connection: ConnectionCoefficients) -> SpinStructure:
    if frame.kind is not FrameKind.ORTHONORMAL:
        raise CanonicalPairError(f"frame {frame.name} is not an orthonormal tetrad")
    if not frame.future_oriented:
        raise CanonicalPairError(f"frame {frame.name} is not declared future-oriented")
    if g.frame is not frame or connection.frame is not frame:
        raise FrameMismatchError("metric, connection and frame must agree")
    d, G = canonical_constants()
    return SpinStructure(frame, g, connection, d, G)


def sandwich(matrix: np.ndarray, G: InfeldVanDerWaerden) -> np.ndarray:
    """¼ Σ G^{is̄}_k M^k_m G^m_{js̄}."""
    out = np.empty((SPINOR, SPINOR), dtype=object)
    for i in range(SPINOR):
        for j in range(SPINOR):
            out[i, j] = total(
                G.components[i, sb, k] * matrix[k, m] * G.inverse[m, j, sb]
                for sb in range(SPINOR)
                for k in range(DIMENSION)
                for m in range(DIMENSION)
            ) / 4
    return out


def lorentz_part(V: np.ndarray, g: FrameMetric) -> np.ndarray:
    """½ (V^i_j − Σ g^{is} V^r_s g_rj): the part of V generating isometries."""
    out = np.empty((DIMENSION, DIMENSION), dtype=object)
    for i in range(DIMENSION):
        for j in range(DIMENSION):
            mirrored = total(
                g.upper[i, s] * V[r, s] * g.lower[r, j] for r in range(DIMENSION) for s in range(DIMENSION)
            )
            out[i, j] = (V[i, j] - mirrored) / 2
    return out


@dataclass(frozen=True, eq=False)
class SpinLift:
    W: np.ndarray
    variant: str
    frame: Frame
    V: LiftCoefficients

    @cached_property
    def conjugate(self) -> np.ndarray:
        return conjugate_array(self.W)

    def lowered(self, d: SpinMetric) -> np.ndarray:
        """W_ij = Σ_s W^s_i d_sj."""
        out = np.empty((SPINOR, SPINOR), dtype=object)
        for i in range(SPINOR):
            for j in range(SPINOR):
                out[i, j] = total(self.W[s, i] * d.lower[s, j] for s in range(SPINOR))
        return out


def spin_lift_W(X: TensorField, spin: SpinStructure, variant: str = KOSMANN) -> SpinLift:
    """
    W^i_j = ¼ Σ G^{is̄}_k V^k_m G^m_{js̄}.

    The Kosmann V is used as is. For the natural variant V stays natural
    (it drives the spatial indices) while W is built from its Lorentz part,
    which is the Kosmann V of the same field.
    """
    if X.frame is not spin.frame:
        raise FrameMismatchError(f"vector field is in {X.frame.name}, not {spin.frame.name}")
    V = lift(X, spin.metric, variant)
    source = V.matrix if variant == KOSMANN else lorentz_part(V.matrix, spin.metric)
    return SpinLift(sandwich(source, spin.G), variant, spin.frame, V)


def spin_lift_W_covariant(X: TensorField, spin: SpinStructure) -> np.ndarray:
    """W = −⅛ G g∇Xg G + ⅛ G ∇X G − Σ X^m A_m."""
    nabla, raised = _nabla_pair(X, spin)
    A = spin.spin_connection.components
    W = sandwich((nabla - raised) / 2, spin.G)
    for i in range(SPINOR):
        for j in range(SPINOR):
            W[i, j] = W[i, j] - total(X.components[m] * A[i, m, j] for m in range(DIMENSION))
    return W


def _nabla_pair(X: TensorField, spin: SpinStructure) -> tuple[np.ndarray, np.ndarray]:
    """(∇_m X^k, ∇^k X_m) both indexed [k, m]."""
    nabla = covariant_derivative_tensor(X, spin.connection).components
    g = spin.metric
    raised = np.empty((DIMENSION, DIMENSION), dtype=object)
    for k in range(DIMENSION):
        for m in range(DIMENSION):
            raised[k, m] = total(
                g.upper[k, s] * nabla[r, s] * g.lower[r, m] for r in range(DIMENSION) for s in range(DIMENSION)
            )
    return nabla, raised


def equivariance_defect(lifted: SpinLift, spin: SpinStructure) -> np.ndarray:
    """Σ W^a_i G^{iā}_m + Σ G^{aī}_m conj(W^ā_ī) − Σ V^k_m G^{aā}_k."""
    W, Wbar, V, G = lifted.W, lifted.conjugate, lifted.V.matrix, spin.G.components
    out = np.empty((SPINOR, SPINOR, DIMENSION), dtype=object)
    for a, ab, m in np.ndindex(out.shape):
        out[a, ab, m] = (
            total(W[a, i] * G[i, ab, m] for i in range(SPINOR))
            + total(G[a, ib, m] * Wbar[ab, ib] for ib in range(SPINOR))
            - total(V[k, m] * G[a, ab, k] for k in range(DIMENSION))
        )
    return out


def trace_defect(lifted: SpinLift, d: SpinMetric):
    """Σ conj(W_{ūā}) d̄^{āū}."""
    lowered = conjugate_array(lifted.lowered(d))
    return total(lowered[ub, ab] * d.bar_upper[ab, ub] for ab in range(SPINOR) for ub in range(SPINOR))


@dataclass(frozen=True, eq=False)
class SpinDegenerateDiff:
    spinor: np.ndarray
    conjugate: np.ndarray
    spatial: np.ndarray


def spin_degenerate_diff(X: TensorField, spin: SpinStructure) -> SpinDegenerateDiff:
    """Spatial block (∇^iX_j − ∇_jX^i)/2, spinor block ¼ G·(spatial block)·G, and its conjugate."""
    nabla, raised = _nabla_pair(X, spin)
    spatial = (raised - nabla) / 2
    spinor = sandwich(spatial, spin.G)
    return SpinDegenerateDiff(spinor, conjugate_array(spinor), spatial)


def conjugate_block_direct(X: TensorField, spin: SpinStructure) -> np.ndarray:
    """⅛ Σ G^{sī}_k (∇^kX_m − ∇_mX^k) G^m_{sj̄}, assembled without conjugation."""
    nabla, raised = _nabla_pair(X, spin)
    G = spin.G
    out = np.empty((SPINOR, SPINOR), dtype=object)
    for ib in range(SPINOR):
        for jb in range(SPINOR):
            out[ib, jb] = total(
                G.components[s, ib, k] * (raised[k, m] - nabla[k, m]) * G.inverse[m, s, jb]
                for s in range(SPINOR)
                for k in range(DIMENSION)
                for m in range(DIMENSION)
            ) / 8
    return out


def covariant_derivative_spin(
    Y: SpinTensorField, connection: ConnectionCoefficients, A: SpinConnection
) -> SpinTensorField:
    """∇Y with Γ on spatial, A on spinor and Ā on conjugate indices; new lower spatial index last."""
    if not (Y.frame is connection.frame is A.frame):
        raise FrameMismatchError("field, connection and spin connection must share a frame")
    f = Y.frame
    gamma = connection.gamma
    slices = []
    for m in range(DIMENSION):
        derived = np.empty(Y.components.shape, dtype=object)
        for index in np.ndindex(derived.shape):
            derived[index] = f.derivative(Y.components[index], m)
        slices.append(derived + _block_action(Y, A.components[:, m, :], A.conjugate[:, m, :], gamma[:, m, :]))
    e, h, s, z, up, low = Y.counts
    return SpinTensorField((e, h, s, z, up, low + 1), f, np.stack(slices, axis=-1), f"nabla({Y.name})")


def kosmann_lie_spin(X: TensorField, Y: SpinTensorField, V: LiftCoefficients, W: SpinLift) -> SpinTensorField:
    """Transport, −W on spinor, −conj(W) on conjugate, −V on spatial upper indices (transposes with + on lower)."""
    if V.variant != W.variant:
        raise VariantMismatchError(f"V is {V.variant}, W is {W.variant}")
    if not (X.frame is Y.frame is V.frame is W.frame):
        raise FrameMismatchError("X, Y, V and W must share a frame")
    result = _transport(X, Y) - _block_action(Y, W.W, W.conjugate, V.matrix)
    return Y.with_components(result)


def kosmann_lie_spin_split(
    X: TensorField, Y: SpinTensorField, spin: SpinStructure, S: SpinDegenerateDiff
) -> SpinTensorField:
    """𝓛_X = ∇_X + S_X."""
    nabla = covariant_derivative_spin(Y, spin.connection, spin.spin_connection).components
    along = np.empty(Y.components.shape, dtype=object)
    for index in np.ndindex(along.shape):
        along[index] = total(X.components[m] * nabla[index + (m,)] for m in range(DIMENSION))
    return Y.with_components(along + _block_action(Y, S.spinor, S.conjugate, S.spatial))


# ---------------------------------------------------------------------------
# Invariance of the basic fields


@dataclass(frozen=True, eq=False)
class InvarianceReport:
    """Residual arrays for g, d and G; all vanish for the Kosmann variant."""

    variant: str
    residuals: dict[str, np.ndarray]

    def evaluate(self, points) -> dict[str, tuple[float, Point]]:
        evaluator = Evaluator(points)
        out = {}
        for name, residual in self.residuals.items():
            values = np.abs(evaluator.array(residual)).reshape(len(evaluator), -1).max(axis=1)
            worst = int(np.argmax(values))
            out[name] = (float(values[worst]), Point(tuple(evaluator.points[worst])))
        return out


def theorem81_residuals(X: TensorField, spin: SpinStructure, variant: str = KOSMANN) -> InvarianceReport:
    """
    Kosmann variant: 𝓛_X g, 𝓛_X d and 𝓛_X G.
    Natural variant: 𝓛_X d, 𝓛_X g − L_X g and 𝓛_X G − Σ_k S^k_m G_k.
    """
    lifted = spin_lift_W(X, spin, variant)
    frame = spin.frame
    g_field = metric_field(frame, spin.metric)
    d_field = spin_metric_field(frame, spin.d)
    G_field = spin.G.as_field(frame)
    on_g = kosmann_lie_spin(X, g_field, lifted.V, lifted).components
    on_d = kosmann_lie_spin(X, d_field, lifted.V, lifted).components
    on_G = kosmann_lie_spin(X, G_field, lifted.V, lifted).components
    if variant == NATURAL:
        regular = lie_derivative_frame(X, TensorField(0, 2, frame, spin.metric.lower)).components
        S = s_tensor(X, spin.metric, spin.connection).components
        expected = np.empty(on_G.shape, dtype=object)
        for a, ab, m in np.ndindex(on_G.shape):
            expected[a, ab, m] = total(S[k, m] * spin.G.components[a, ab, k] for k in range(DIMENSION))
        on_g = on_g - regular
        on_G = on_G - expected
    return InvarianceReport(variant, {"metric": on_g, "spin_metric": on_d, "ivw": on_G})


# ---------------------------------------------------------------------------
# SL(2,C) -> SO+(1,3)


def spin_to_lorentz(matrix) -> np.ndarray:
    """S^n_m = ½ Σ_{aā} (𝔖 σ_m 𝔖†)^{aā} G^n_{aā}."""
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (SPINOR, SPINOR):
        raise HomomorphismError(f"expected a 2x2 matrix, got shape {matrix.shape}")
    det = np.linalg.det(matrix)
    if abs(det - 1) > HOMOMORPHISM_TOLERANCE:
        raise HomomorphismError(f"determinant {det:.6g} is not 1")
    images = np.einsum("ai,mij,bj->mab", matrix, PAULI, matrix.conj())
    lorentz = np.einsum("mab,nab->nm", images, PAULI_INVERSE) / 2
    scale = max(1.0, float(np.abs(lorentz).max()))
    if np.abs(lorentz.imag).max() > HOMOMORPHISM_TOLERANCE * scale:
        raise HomomorphismError("image is not real")
    return lorentz.real


@dataclass(frozen=True)
class ConsistencyReport:
    errors: dict[float, float]

    @property
    def at_rounding(self) -> bool:
        return max(self.errors.values()) <= 1e-12

    @property
    def slope(self) -> float | None:
        usable = [(eps, err) for eps, err in self.errors.items() if err > 1e-12]
        if len(usable) < 2:
            return None
        eps, err = np.log(np.array(usable)).T
        return float(np.polyfit(eps, err, 1)[0])


def exponential_consistency(V: np.ndarray, W: np.ndarray, eps_list: Sequence[float] = (1e-1, 5e-2, 2.5e-2)) -> ConsistencyReport:
    """max |spin_to_lorentz(exp(εW)) − exp(εV)| for each ε, on numeric V and W."""
    V = np.asarray(V, dtype=complex)
    W = np.asarray(W, dtype=complex)
    if np.abs(V.imag).max() > HOMOMORPHISM_TOLERANCE:
        raise HomomorphismError("V must be real")
    errors = {}
    for eps in eps_list:
        lifted = expm(eps * W)
        # normalise rounding drift of the determinant
        lifted = lifted / np.sqrt(np.linalg.det(lifted))
        errors[float(eps)] = float(np.abs(spin_to_lorentz(lifted) - expm(eps * V.real)).max())
    return ConsistencyReport(errors)

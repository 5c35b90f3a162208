"""
Metric, frames, commutation coefficients and the Levi-Civita connection.

Index conventions used throughout the package:

* frame matrix `Frame.vectors[i, m]` is component i of frame vector m
  (coordinate basis), the dual frame `Frame.dual[a, i]` is component i of
  covector a;
* commutation coefficients `c[k, i, j]`: [Υ_i, Υ_j] = Σ_k c^k_ij Υ_k;
* connection `Γ[k, i, j]`: ∇_{Υ_i} Υ_j = Σ_k Γ^k_ij Υ_k, so the first lower
  index is the direction of differentiation;
* a covariant derivative appends the differentiation index as the last
  lower index.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache

import numpy as np

from expr import DIMENSION, ONE, ZERO, Evaluator, Expr, Point, as_expr, const, conj, differentiate, total

log = logging.getLogger(__name__)

MINKOWSKI = np.diag([1.0, -1.0, -1.0, -1.0])
SIGNATURE = (1, -1, -1, -1)

# |det| below this counts as singular at a sample point
SINGULAR_THRESHOLD = 1e-12


class GeometryError(Exception):
    """Base error for metric, frame and connection construction."""

    def __init__(self, message: str, point: Point | None = None):
        if point is not None:
            message = f"{message} at {point}"
        super().__init__(message)
        self.point = point


class SingularMetricError(GeometryError):
    pass


class SingularFrameError(GeometryError):
    pass


class OrthonormalityError(GeometryError):
    pass


class FrameMismatchError(GeometryError):
    pass


class FrameKind(str, Enum):
    HOLONOMIC = "holonomic"
    GENERAL = "general"
    ORTHONORMAL = "orthonormal"


# ---------------------------------------------------------------------------
# Object arrays of expressions


def expr_array(values) -> np.ndarray:
    values = np.asarray(values, dtype=object)
    out = np.empty(values.shape, dtype=object)
    for index in np.ndindex(values.shape):
        out[index] = as_expr(values[index])
    return out


def zeros(shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(ZERO)
    return out


def identity(n: int = DIMENSION) -> np.ndarray:
    out = zeros((n, n))
    for k in range(n):
        out[k, k] = ONE
    return out


def conjugate_array(values: np.ndarray) -> np.ndarray:
    out = np.empty(values.shape, dtype=object)
    for index in np.ndindex(values.shape):
        out[index] = conj(values[index])
    return out


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    rows, inner = a.shape
    cols = b.shape[1]
    out = np.empty((rows, cols), dtype=object)
    for i in range(rows):
        for j in range(cols):
            out[i, j] = total(a[i, k] * b[k, j] for k in range(inner))
    return out


def act_on_index(components: np.ndarray, axis: int, matrix: np.ndarray) -> np.ndarray:
    """out[.., a, ..] = Σ_k matrix[a, k] · components[.., k, ..] along `axis`."""
    out = np.empty(components.shape, dtype=object)
    for index in np.ndindex(components.shape):
        a = index[axis]
        out[index] = total(
            matrix[a, k] * components[index[:axis] + (k,) + index[axis + 1 :]]
            for k in range(matrix.shape[1])
        )
    return out


def determinant(m: np.ndarray) -> Expr:
    """Laplace expansion along the first row."""
    n = m.shape[0]
    if n == 1:
        return m[0, 0]
    if n == 2:
        return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    terms = []
    for j in range(n):
        if m[0, j].is_number(0):
            continue
        minor = np.delete(m[1:], j, axis=1)
        term = m[0, j] * determinant(minor)
        terms.append(-term if j % 2 else term)
    return total(terms)


def is_diagonal(m: np.ndarray) -> bool:
    n = m.shape[0]
    return all(m[i, j].is_number(0) for i in range(n) for j in range(n) if i != j)


def symbolic_inverse(m: np.ndarray) -> np.ndarray:
    """Adjugate over determinant; diagonal matrices invert entrywise."""
    n = m.shape[0]
    if is_diagonal(m):
        out = zeros((n, n))
        for k in range(n):
            out[k, k] = ONE / m[k, k]
        return out
    det = determinant(m)
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(m, i, axis=0), j, axis=1)
            cofactor = determinant(minor)
            if (i + j) % 2:
                cofactor = -cofactor
            out[j, i] = cofactor / det
    return out


def check_invertible(matrix: np.ndarray, points, error=GeometryError, what: str = "matrix") -> None:
    evaluator = Evaluator(points)
    values = evaluator.array(matrix)
    dets = np.linalg.det(values)
    bad = np.flatnonzero(np.abs(dets) <= SINGULAR_THRESHOLD)
    if bad.size:
        raise error(f"{what} is singular", Point(tuple(evaluator.points[bad[0]])))


# ---------------------------------------------------------------------------
# Metric and frames


@dataclass(frozen=True, eq=False)
class Metric:
    """Metric components g_ij in the coordinate frame, signature (+,-,-,-)."""

    components: np.ndarray
    signature: tuple[int, int, int, int] = SIGNATURE

    def __post_init__(self):
        components = expr_array(self.components)
        if components.shape != (DIMENSION, DIMENSION):
            raise GeometryError(f"metric must be {DIMENSION}x{DIMENSION}, got {components.shape}")
        for i in range(DIMENSION):
            for j in range(i + 1, DIMENSION):
                if str(components[i, j]) != str(components[j, i]):
                    raise GeometryError("metric not symmetric")
        object.__setattr__(self, "components", components)

    @cached_property
    def inverse(self) -> np.ndarray:
        return inverse_metric(self)

    def __repr__(self) -> str:
        return f"<Metric {[str(self.components[k, k]) for k in range(DIMENSION)]}>"


def inverse_metric(g: Metric, points=None) -> np.ndarray:
    if points is not None:
        check_invertible(g.components, points, SingularMetricError, "metric")
    return symbolic_inverse(g.components)


@dataclass(frozen=True, eq=False)
class Frame:
    """
    Four vector fields Υ_m given by their coordinate components.

    Frames are compared by identity; tensor fields carry the frame they are
    expressed in and operations refuse to mix frames.
    """

    kind: FrameKind
    vectors: np.ndarray
    future_oriented: bool = True
    name: str = "frame"

    def __post_init__(self):
        vectors = expr_array(self.vectors)
        if vectors.shape != (DIMENSION, DIMENSION):
            raise GeometryError(f"frame matrix must be {DIMENSION}x{DIMENSION}, got {vectors.shape}")
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "kind", FrameKind(self.kind))

    @cached_property
    def dual(self) -> np.ndarray:
        return dual_frame(self)

    @cached_property
    def commutation(self) -> np.ndarray:
        return commutation_coefficients(self)

    @property
    def is_holonomic(self) -> bool:
        return self.kind is FrameKind.HOLONOMIC

    def derivative(self, e: Expr, m: int) -> Expr:
        return frame_derivative(self, e, m)

    def __repr__(self) -> str:
        return f"<Frame {self.name} ({self.kind.value})>"


HOLONOMIC = Frame(FrameKind.HOLONOMIC, identity(), name="holonomic")


@lru_cache(maxsize=1 << 17)
def frame_derivative(frame: Frame, e: Expr, m: int) -> Expr:
    """L_{Υ_m}(e) = Σ_i Υ^i_m ∂_i e."""
    return total(frame.vectors[i, m] * differentiate(e, i) for i in range(DIMENSION))


def dual_frame(f: Frame) -> np.ndarray:
    return symbolic_inverse(f.vectors)


def commutation_coefficients(f: Frame) -> np.ndarray:
    vectors = f.vectors
    eta = f.dual
    c = zeros((DIMENSION,) * 3)
    for i in range(DIMENSION):
        for j in range(i + 1, DIMENSION):
            bracket = [
                total(
                    vectors[m, i] * differentiate(vectors[k, j], m)
                    - vectors[m, j] * differentiate(vectors[k, i], m)
                    for m in range(DIMENSION)
                )
                for k in range(DIMENSION)
            ]
            for a in range(DIMENSION):
                value = total(eta[a, k] * bracket[k] for k in range(DIMENSION))
                c[a, i, j] = value
                c[a, j, i] = -value
    return c


def check_frame(f: Frame, points) -> None:
    check_invertible(f.vectors, points, SingularFrameError, f"frame {f.name}")


def check_handedness(f: Frame, points) -> None:
    evaluator = Evaluator(points)
    dets = np.linalg.det(evaluator.array(f.vectors))
    bad = np.flatnonzero(dets.real <= 0)
    if bad.size:
        raise GeometryError(f"frame {f.name} is not right-handed", Point(tuple(evaluator.points[bad[0]])))


def pull_back_metric(g: Metric, f: Frame) -> np.ndarray:
    """g(Υ_a, Υ_b) = Σ_ij Υ^i_a Υ^j_b g_ij."""
    out = np.empty((DIMENSION, DIMENSION), dtype=object)
    for a in range(DIMENSION):
        for b in range(a, DIMENSION):
            value = total(
                f.vectors[i, a] * f.vectors[j, b] * g.components[i, j]
                for i in range(DIMENSION)
                for j in range(DIMENSION)
            )
            out[a, b] = out[b, a] = value
    return out


def check_orthonormal(g: Metric, f: Frame, points, tolerance: float = 1e-9) -> None:
    evaluator = Evaluator(points)
    values = evaluator.array(pull_back_metric(g, f))
    deviation = np.abs(values - MINKOWSKI).reshape(len(evaluator), -1).max(axis=1)
    bad = np.flatnonzero(deviation > tolerance)
    if bad.size:
        raise OrthonormalityError(
            f"frame {f.name} is not orthonormal (deviation {deviation[bad[0]]:.3e})",
            Point(tuple(evaluator.points[bad[0]])),
        )


@dataclass(frozen=True, eq=False)
class FrameMetric:
    """Metric components in a given frame together with their inverse."""

    frame: Frame
    lower: np.ndarray

    @cached_property
    def upper(self) -> np.ndarray:
        return symbolic_inverse(self.lower)


def frame_metric(g: Metric, f: Frame) -> FrameMetric:
    if f.kind is FrameKind.ORTHONORMAL:
        return FrameMetric(f, expr_array(MINKOWSKI))
    if f.is_holonomic:
        return FrameMetric(f, g.components)
    return FrameMetric(f, pull_back_metric(g, f))


# ---------------------------------------------------------------------------
# Connections


@dataclass(frozen=True, eq=False)
class ConnectionCoefficients:
    gamma: np.ndarray
    frame: Frame

    def __getitem__(self, index):
        return self.gamma[index]


def christoffel_holonomic(g: Metric) -> ConnectionCoefficients:
    ginv = g.inverse
    gl = g.components
    dg = [[[differentiate(gl[r, j], i) for j in range(DIMENSION)] for r in range(DIMENSION)] for i in range(DIMENSION)]
    gamma = np.empty((DIMENSION,) * 3, dtype=object)
    for k in range(DIMENSION):
        for i in range(DIMENSION):
            for j in range(i, DIMENSION):
                value = total(
                    ginv[k, r] * (dg[i][r][j] + dg[j][i][r] - dg[r][i][j])
                    for r in range(DIMENSION)
                ) / 2
                gamma[k, i, j] = gamma[k, j, i] = value
    return ConnectionCoefficients(gamma, HOLONOMIC)


def christoffel_frame(g_frame: FrameMetric, f: Frame | None = None) -> ConnectionCoefficients:
    """
    Levi-Civita connection in an arbitrary frame.

        Γ^k_ij = Σ_r g^{kr}/2 (Υ_i g_rj + Υ_j g_ir − Υ_r g_ij) + c^k_ij/2
                 − Σ_rs c^s_ir g^{kr} g_sj/2 − Σ_rs c^s_jr g^{kr} g_si/2

    In orthonormal frames the derivative terms vanish; in the holonomic
    frame the c-terms vanish.
    """
    f = f or g_frame.frame
    if f is not g_frame.frame:
        raise FrameMismatchError(f"metric is given in {g_frame.frame.name}, not {f.name}")
    gl, gu, c = g_frame.lower, g_frame.upper, f.commutation
    n = DIMENSION
    dg = [[[f.derivative(gl[r, j], i) for j in range(n)] for r in range(n)] for i in range(n)]
    # c^s_ir g_sj lowered on the first index: cl[i][r][j] = Σ_s c^s_ir g_sj
    cl = [[[total(c[s, i, r] * gl[s, j] for s in range(n)) for j in range(n)] for r in range(n)] for i in range(n)]
    gamma = np.empty((n,) * 3, dtype=object)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                metric_part = total(
                    gu[k, r] * (dg[i][r][j] + dg[j][i][r] - dg[r][i][j]) for r in range(n)
                )
                twist = total(gu[k, r] * (cl[i][r][j] + cl[j][r][i]) for r in range(n))
                gamma[k, i, j] = (metric_part + c[k, i, j] - twist) / 2
    return ConnectionCoefficients(gamma, f)


def covariant_derivative_tensor(Y, connection: ConnectionCoefficients):
    """∇Y with the differentiation index appended as the last lower index."""
    from lie import TensorField  # noqa: WPS433 (lie imports geometry)

    if Y.frame is not connection.frame:
        raise FrameMismatchError(f"field is in {Y.frame.name}, connection in {connection.frame.name}")
    f, gamma = Y.frame, connection.gamma
    r = Y.upper
    rank = Y.upper + Y.lower
    source = Y.components
    out = np.empty(source.shape + (DIMENSION,), dtype=object)
    for index in np.ndindex(out.shape):
        idx, m = index[:-1], index[-1]
        terms = [f.derivative(source[idx], m)]
        for p in range(rank):
            for k in range(DIMENSION):
                moved = source[idx[:p] + (k,) + idx[p + 1 :]]
                if p < r:
                    terms.append(gamma[idx[p], m, k] * moved)
                else:
                    terms.append(-(gamma[k, m, idx[p]] * moved))
        out[index] = total(terms)
    return TensorField(Y.upper, Y.lower + 1, f, out)


@dataclass(frozen=True, eq=False)
class SpinConnection:
    """A^i_{rj} stored as components[i, r, j]."""

    components: np.ndarray
    frame: Frame

    @cached_property
    def conjugate(self) -> np.ndarray:
        return conjugate_array(self.components)

    def matrix(self, r: int) -> np.ndarray:
        return self.components[:, r, :]


def spin_connection(connection: ConnectionCoefficients, f: Frame, G, d) -> SpinConnection:
    """
    Spinor connection components from the tangent connection:

        A^i_rj = ¼ Σ G^{is̄}_k Γ^k_rm G^m_{js̄} − ¼ Σ L_{Υ_r}(G^{is̄}_q) G^q_{js̄}
                 − ¼ δ^i_j Σ L_{Υ_r}(d̄_{j̄ī}) d̄^{īj̄}

    `G` supplies `components[a, ā, m]` and `inverse[m, u, ū]`, `d` supplies
    `lower` and `upper`. With constant G and d only the first term survives.
    """
    if connection.frame is not f:
        raise FrameMismatchError(f"connection is in {connection.frame.name}, not {f.name}")
    g_up, g_down, gamma = G.components, G.inverse, connection.gamma
    d_bar_lower = conjugate_array(d.lower)
    d_bar_upper = conjugate_array(d.upper)
    out = np.empty((2, DIMENSION, 2), dtype=object)
    for r in range(DIMENSION):
        trace_term = total(
            f.derivative(d_bar_lower[jb, ib], r) * d_bar_upper[ib, jb] for ib in range(2) for jb in range(2)
        )
        # Γ_r sandwiched: Σ_k,m G^{is̄}_k Γ^k_rm
        for i in range(2):
            for j in range(2):
                first = total(
                    g_up[i, sb, k] * gamma[k, r, m] * g_down[m, j, sb]
                    for sb in range(2)
                    for k in range(DIMENSION)
                    for m in range(DIMENSION)
                )
                second = total(
                    f.derivative(g_up[i, sb, q], r) * g_down[q, j, sb] for sb in range(2) for q in range(DIMENSION)
                )
                value = (first - second) / 4
                if i == j:
                    value = value - trace_term / 4
                out[i, r, j] = value
    return SpinConnection(out, f)


def constant_array(values) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    out = np.empty(values.shape, dtype=object)
    for index in np.ndindex(values.shape):
        out[index] = const(values[index])
    return out

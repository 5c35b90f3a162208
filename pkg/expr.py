"""
Expression trees over the four chart coordinates.

Component functions of every field (metric, frame vectors, vector fields,
tensor and spinor components) are `Expr` trees. Trees are immutable and
hashable; equal structure means equal hash, so they work as cache keys.

Grammar accepted by `parse` (and emitted by `str(expr)`):

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := atom ('^' unary)?
    atom    := number | name | func '(' expr ')' | '(' expr ')'
    number  := digits ['.' digits] [('e' | 'E') ['+' | '-'] digits]
    name    := one of the four coordinate names, or 'i' (imaginary unit)
    func    := conj | sin | cos | tan | exp | log | sqrt | sinh | cosh

`^` is right-associative and binds tighter than unary minus, so `-t^2`
is `-(t^2)`. Exponents must fold to constants.
"""

from __future__ import annotations

import cmath
import logging
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

log = logging.getLogger(__name__)

DIMENSION = 4

FUNCTIONS = ("conj", "sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh")
UNARY = ("neg",) + FUNCTIONS
BINARY = ("add", "sub", "mul", "div", "pow")

_SYMBOLS = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}
_PRECEDENCE = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}

_CMATH = {
    "sin": cmath.sin,
    "cos": cmath.cos,
    "tan": cmath.tan,
    "exp": cmath.exp,
    "log": cmath.log,
    "sqrt": cmath.sqrt,
    "sinh": cmath.sinh,
    "cosh": cmath.cosh,
}
_NUMPY = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "sinh": np.sinh,
    "cosh": np.cosh,
}


class ExprError(Exception):
    """Base error of the expression language."""


class ParseError(ExprError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class EvaluationError(ExprError):
    def __init__(self, message: str, node: "Expr"):
        super().__init__(f"{message} in {_abbreviate(node)}")
        self.node = node


class Expr:
    """
    Immutable expression node.

    `kind` is "const", "coord", one of UNARY or one of BINARY. Constants keep
    their complex value in `value`; coordinates keep their index there.
    Build trees with `const`, `coord`, `unary`, `binary` or the arithmetic
    operators; those fold constants and drop 0/1 identities.
    """

    __slots__ = ("kind", "args", "value", "_hash")

    def __init__(self, kind: str, args: tuple["Expr", ...] = (), value: complex | int | None = None):
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "_hash", hash((kind, value, args)))

    def __setattr__(self, name, value):
        raise AttributeError("Expr is immutable")

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Expr):
            return NotImplemented
        return (
            self._hash == other._hash
            and self.kind == other.kind
            and self.value == other.value
            and self.args == other.args
        )

    def __repr__(self) -> str:
        return f"<Expr {_abbreviate(self)}>"

    def __str__(self) -> str:
        return to_string(self)

    @property
    def is_const(self) -> bool:
        return self.kind == "const"

    def is_number(self, number: complex) -> bool:
        return self.kind == "const" and self.value == number

    # Arithmetic goes through the simplifying constructors.
    def __add__(self, other):
        other = _coerce(other)
        return NotImplemented if other is None else binary("add", self, other)

    def __radd__(self, other):
        other = _coerce(other)
        return NotImplemented if other is None else binary("add", other, self)

    def __sub__(self, other):
        other = _coerce(other)
        return NotImplemented if other is None else binary("sub", self, other)

    def __rsub__(self, other):
        other = _coerce(other)
        return NotImplemented if other is None else binary("sub", other, self)

    def __mul__(self, other):
        other = _coerce(other)
        return NotImplemented if other is None else binary("mul", self, other)

    def __rmul__(self, other):
        other = _coerce(other)
        return NotImplemented if other is None else binary("mul", other, self)

    def __truediv__(self, other):
        other = _coerce(other)
        return NotImplemented if other is None else binary("div", self, other)

    def __rtruediv__(self, other):
        other = _coerce(other)
        return NotImplemented if other is None else binary("div", other, self)

    def __pow__(self, other):
        other = _coerce(other)
        return NotImplemented if other is None else binary("pow", self, other)

    def __neg__(self):
        return unary("neg", self)

    def conjugate(self) -> "Expr":
        return unary("conj", self)


@dataclass(frozen=True)
class Point:
    """A chart point (x^0, x^1, x^2, x^3)."""

    coords: tuple[float, float, float, float]

    def __post_init__(self):
        coords = tuple(float(x) for x in self.coords)
        if len(coords) != DIMENSION:
            raise ValueError(f"a point needs {DIMENSION} coordinates, got {len(coords)}")
        if not all(np.isfinite(coords)):
            raise ValueError(f"point coordinates must be finite: {coords}")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, *coords: float) -> "Point":
        return cls(tuple(coords))

    def __iter__(self):
        return iter(self.coords)

    def __str__(self) -> str:
        return "(" + ",".join(f"{x:.6g}" for x in self.coords) + ")"


# ---------------------------------------------------------------------------
# Construction


def const(value: complex | float | int) -> Expr:
    value = complex(value)
    if value.imag == 0.0:
        # one signed zero for hashing
        value = complex(value.real + 0.0, 0.0)
    return Expr("const", (), value)


ZERO = const(0)
ONE = const(1)
I = const(1j)


def coord(index: int) -> Expr:
    if not 0 <= index < DIMENSION:
        raise ExprError(f"coordinate index {index} outside 0..{DIMENSION - 1}")
    return Expr("coord", (), index)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, float, complex, np.number)):
        return const(complex(value))
    raise TypeError(f"cannot use {type(value).__name__} as an expression")


def _coerce(value) -> Expr | None:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, float, complex, np.number)):
        return const(complex(value))
    return None


def unary(op: str, a: Expr) -> Expr:
    if op not in UNARY:
        raise ExprError(f"unknown unary operator {op!r}")
    if op == "neg":
        if a.is_const:
            return const(-a.value)
        if a.kind == "neg":
            return a.args[0]
        return Expr("neg", (a,))
    if op == "conj":
        if a.is_const:
            return const(a.value.conjugate())
        if a.kind == "coord":
            return a
        if a.kind == "conj":
            return a.args[0]
        return Expr("conj", (a,))
    if a.is_const:
        folded = _fold(_CMATH[op], a.value)
        if folded is not None:
            return const(folded)
    return Expr(op, (a,))


def binary(op: str, a: Expr, b: Expr) -> Expr:
    if op == "add":
        if a.is_const and b.is_const:
            return const(a.value + b.value)
        if a.is_number(0):
            return b
        if b.is_number(0):
            return a
    elif op == "sub":
        if a.is_const and b.is_const:
            return const(a.value - b.value)
        if b.is_number(0):
            return a
        if a.is_number(0):
            return unary("neg", b)
    elif op == "mul":
        if a.is_const and b.is_const:
            return const(a.value * b.value)
        if a.is_number(0) or b.is_number(0):
            return ZERO
        if a.is_number(1):
            return b
        if b.is_number(1):
            return a
        if a.is_number(-1):
            return unary("neg", b)
        if b.is_number(-1):
            return unary("neg", a)
    elif op == "div":
        if b.is_number(0):
            return Expr("div", (a, b))
        if a.is_const and b.is_const:
            return const(a.value / b.value)
        if a.is_number(0):
            return ZERO
        if b.is_number(1):
            return a
    elif op == "pow":
        if not b.is_const:
            raise ExprError(f"exponent must be constant, got {_abbreviate(b)}")
        if b.is_number(0):
            return ONE
        if b.is_number(1):
            return a
        if a.is_const:
            folded = _fold(pow, a.value, b.value)
            if folded is not None:
                return const(folded)
    else:
        raise ExprError(f"unknown binary operator {op!r}")
    return Expr(op, (a, b))


def _fold(fn, *values):
    try:
        result = complex(fn(*values))
    except (ArithmeticError, ValueError):
        return None
    if not (np.isfinite(result.real) and np.isfinite(result.imag)):
        return None
    return result


def total(terms: Iterable[Expr]) -> Expr:
    """Sum built as a balanced tree, skipping zeros."""
    items = [t for t in terms if not t.is_number(0)]
    if not items:
        return ZERO
    while len(items) > 1:
        paired = [binary("add", items[k], items[k + 1]) for k in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            paired.append(items[-1])
        items = paired
    return items[0]


def sin(a: Expr) -> Expr:
    return unary("sin", a)


def cos(a: Expr) -> Expr:
    return unary("cos", a)


def exp(a: Expr) -> Expr:
    return unary("exp", a)


def sqrt(a: Expr) -> Expr:
    return unary("sqrt", a)


def conj(a: Expr) -> Expr:
    return unary("conj", as_expr(a))


# ---------------------------------------------------------------------------
# Differentiation


@lru_cache(maxsize=1 << 17)
def differentiate(e: Expr, k: int) -> Expr:
    """Exact partial derivative with respect to coordinate k."""
    if not 0 <= k < DIMENSION:
        raise ExprError(f"coordinate index {k} outside 0..{DIMENSION - 1}")
    kind = e.kind
    if kind == "const":
        return ZERO
    if kind == "coord":
        return ONE if e.value == k else ZERO
    if kind in UNARY:
        (a,) = e.args
        da = differentiate(a, k)
        if da.is_number(0):
            return ZERO
        if kind == "neg":
            return -da
        if kind == "conj":
            return conj(da)
        if kind == "sin":
            return cos(a) * da
        if kind == "cos":
            return -(sin(a) * da)
        if kind == "tan":
            return da / cos(a) ** 2
        if kind == "exp":
            return e * da
        if kind == "log":
            return da / a
        if kind == "sqrt":
            return da / (2 * e)
        if kind == "sinh":
            return unary("cosh", a) * da
        if kind == "cosh":
            return unary("sinh", a) * da
    a, b = e.args
    da = differentiate(a, k)
    if kind == "pow":
        if da.is_number(0):
            return ZERO
        return b * a ** const(b.value - 1) * da
    db = differentiate(b, k)
    if kind == "add":
        return da + db
    if kind == "sub":
        return da - db
    if kind == "mul":
        return da * b + a * db
    if kind == "div":
        if db.is_number(0):
            return da / b
        return (da * b - a * db) / b ** 2
    raise ExprError(f"cannot differentiate node kind {kind!r}")


# ---------------------------------------------------------------------------
# Evaluation


class Evaluator:
    """
    Evaluates trees at a fixed batch of points, vectorised over the batch.

    Results are cached per node for the lifetime of the evaluator, so
    subtrees shared between components are computed once.
    """

    def __init__(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != DIMENSION:
            raise ValueError(f"points must have shape (N, {DIMENSION}), got {points.shape}")
        self.points = points
        self._cache: dict[Expr, np.ndarray] = {}

    def __len__(self) -> int:
        return self.points.shape[0]

    def __call__(self, e: Expr) -> np.ndarray:
        cache = self._cache
        if e in cache:
            return cache[e]
        stack: list[tuple[Expr, bool]] = [(e, False)]
        while stack:
            node, ready = stack.pop()
            if node in cache:
                continue
            if ready:
                cache[node] = self._compute(node)
                continue
            stack.append((node, True))
            stack.extend((child, False) for child in node.args if child not in cache)
        return cache[e]

    def array(self, components) -> np.ndarray:
        """Evaluate an object array of trees; result shape is (N,) + components.shape."""
        components = np.asarray(components, dtype=object)
        out = np.empty((len(self),) + components.shape, dtype=complex)
        for index in np.ndindex(components.shape):
            out[(slice(None),) + index] = self(as_expr(components[index]))
        return out

    def _compute(self, node: Expr) -> np.ndarray:
        kind = node.kind
        n = len(self)
        if kind == "const":
            return np.full(n, node.value, dtype=complex)
        if kind == "coord":
            return self.points[:, node.value].astype(complex)
        values = [self._cache[child] for child in node.args]
        with np.errstate(all="ignore"):
            if kind == "neg":
                result = -values[0]
            elif kind == "conj":
                result = np.conj(values[0])
            elif kind in _NUMPY:
                if kind == "log" and np.any(values[0] == 0):
                    raise EvaluationError("log of zero", node)
                result = _NUMPY[kind](values[0])
            elif kind == "add":
                result = values[0] + values[1]
            elif kind == "sub":
                result = values[0] - values[1]
            elif kind == "mul":
                result = values[0] * values[1]
            elif kind == "div":
                if np.any(values[1] == 0):
                    raise EvaluationError("division by zero", node)
                result = values[0] / values[1]
            elif kind == "pow":
                exponent = node.args[1].value
                if exponent.real < 0 and np.any(values[0] == 0):
                    raise EvaluationError("division by zero", node)
                result = _power(values[0], exponent)
            else:
                raise EvaluationError(f"unknown node kind {kind!r}", node)
        if not np.all(np.isfinite(result)):
            raise EvaluationError("non-finite value (domain error)", node)
        return result


def _power(base: np.ndarray, exponent: complex) -> np.ndarray:
    if exponent.imag == 0 and float(exponent.real).is_integer():
        return base ** int(exponent.real)
    return base ** exponent


def evaluate(e: Expr, p: Point) -> complex:
    return complex(Evaluator([p.coords])(e)[0])


# ---------------------------------------------------------------------------
# Printing


def to_string(e: Expr) -> str:
    kind = e.kind
    if kind == "const":
        return _format_constant(e.value)
    if kind == "coord":
        return _COORDINATE_NAMES.get(e.value, f"x{e.value}")
    if kind == "neg":
        (a,) = e.args
        inner = to_string(a)
        if a.kind in ("add", "sub", "mul", "div", "neg"):
            inner = f"({inner})"
        return f"-{inner}"
    if kind in FUNCTIONS:
        return f"{kind}({to_string(e.args[0])})"
    a, b = e.args
    left, right = to_string(a), to_string(b)
    prec = _PRECEDENCE[kind]
    if kind == "pow":
        if _binding(a) <= prec:
            left = f"({left})"
        return f"{left}^{right}"
    if _binding(a) < prec:
        left = f"({left})"
    if _binding(b) <= prec or b.kind == "neg":
        right = f"({right})"
    return f"{left}{_SYMBOLS[kind]}{right}"


# The printer writes coordinates as x0..x3; parse accepts these names by default.
_COORDINATE_NAMES = {k: f"x{k}" for k in range(DIMENSION)}


def _binding(e: Expr) -> int:
    if e.kind in _PRECEDENCE:
        return _PRECEDENCE[e.kind]
    return 5


def _format_constant(value: complex) -> str:
    re_part, im_part = value.real, value.imag
    if im_part == 0:
        text = _format_real(re_part)
        return f"({text})" if re_part < 0 else text
    if re_part == 0:
        if im_part == 1:
            return "i"
        return f"({_format_real(im_part)}*i)"
    sign = "+" if im_part > 0 else "-"
    magnitude = abs(im_part)
    imag = "i" if magnitude == 1 else f"{_format_real(magnitude)}*i"
    return f"({_format_real(re_part)}{sign}{imag})"


def _format_real(x: float) -> str:
    if float(x).is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(float(x))


def _abbreviate(e: Expr, limit: int = 80) -> str:
    text = to_string(e)
    return text if len(text) <= limit else text[: limit - 3] + "..."


# ---------------------------------------------------------------------------
# Parsing

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)

DEFAULT_NAMES = tuple(_COORDINATE_NAMES[k] for k in range(DIMENSION))


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    position: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _TOKEN.match(text, pos)
        if match is None or match.end() == pos:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        kind = match.lastgroup
        tokens.append(_Token(kind, match.group(kind), match.start(kind)))
        pos = match.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, names: Sequence[str]):
        self.tokens = _tokenize(text)
        self.index = 0
        self.names = {name: k for k, name in enumerate(names)}

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, text: str) -> None:
        token = self.current
        if token.text != text:
            found = token.text or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", token.position)
        self.advance()

    def parse(self) -> Expr:
        if self.current.kind == "end":
            raise ParseError("empty expression", 0)
        tree = self.expression()
        if self.current.kind != "end":
            raise ParseError(f"unexpected {self.current.text!r}", self.current.position)
        return tree

    def expression(self) -> Expr:
        tree = self.term()
        while self.current.text in ("+", "-"):
            op = "add" if self.advance().text == "+" else "sub"
            tree = binary(op, tree, self.term())
        return tree

    def term(self) -> Expr:
        tree = self.unary()
        while self.current.text in ("*", "/"):
            op = "mul" if self.advance().text == "*" else "div"
            tree = binary(op, tree, self.unary())
        return tree

    def unary(self) -> Expr:
        if self.current.text == "-":
            self.advance()
            return unary("neg", self.unary())
        if self.current.text == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.current.text == "^":
            token = self.advance()
            exponent = self.unary()
            if not exponent.is_const:
                raise ParseError("exponent must be a constant expression", token.position)
            return binary("pow", base, exponent)
        return base

    def atom(self) -> Expr:
        token = self.current
        if token.kind == "number":
            value = float(token.text)
            if not np.isfinite(value):
                raise ParseError(f"number {token.text!r} is out of range", token.position)
            self.advance()
            return const(value)
        if token.kind == "name":
            self.advance()
            if self.current.text == "(":
                if token.text not in FUNCTIONS:
                    raise ParseError(f"unknown function {token.text!r}", token.position)
                self.advance()
                argument = self.expression()
                self.expect(")")
                return unary(token.text, argument)
            if token.text in self.names:
                return coord(self.names[token.text])
            if token.text == "i":
                return I
            raise ParseError(f"unknown identifier {token.text!r}", token.position)
        if token.text == "(":
            self.advance()
            tree = self.expression()
            self.expect(")")
            return tree
        found = token.text or "end of input"
        raise ParseError(f"unexpected {found!r}", token.position)


def check_coordinate_names(names: Sequence[str]) -> tuple[str, ...]:
    names = tuple(names)
    if len(names) != DIMENSION:
        raise ExprError(f"expected {DIMENSION} coordinate names, got {len(names)}")
    if len(set(names)) != DIMENSION:
        raise ExprError(f"coordinate names must be distinct: {names}")
    for name in names:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
            raise ExprError(f"invalid coordinate name {name!r}")
        if name == "i" or name in FUNCTIONS:
            raise ExprError(f"coordinate name {name!r} is reserved")
    return names


def parse(text: str, coordinate_names: Sequence[str] = DEFAULT_NAMES) -> Expr:
    names = check_coordinate_names(coordinate_names)
    try:
        return _Parser(text, names).parse()
    except ParseError:
        raise
    except ExprError as exc:
        raise ParseError(str(exc), 0) from exc


def to_source(e: Expr, coordinate_names: Sequence[str]) -> str:
    """Print with the given coordinate names instead of x0..x3."""
    names = check_coordinate_names(coordinate_names)
    text = to_string(e)
    return re.sub(r"\bx([0-3])\b", lambda m: names[int(m.group(1))], text)


# ---------------------------------------------------------------------------
# Random polynomials for test pools


def random_polynomial(
    rng: np.random.Generator, degree: int = 2, terms: int = 3, complex_coefficients: bool = False
) -> Expr:
    """A sum of `terms` random monomials of total degree <= `degree`."""
    monomials = []
    for _ in range(terms):
        coefficient = round(rng.uniform(-1.0, 1.0), 3)
        if complex_coefficients:
            coefficient += 1j * round(rng.uniform(-1.0, 1.0), 3)
        monomial = const(coefficient)
        for _ in range(int(rng.integers(0, degree + 1))):
            monomial = monomial * coord(int(rng.integers(0, DIMENSION)))
        monomials.append(monomial)
    return total(monomials)

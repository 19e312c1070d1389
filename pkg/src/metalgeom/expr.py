"""Scalar field expressions: parser, serializer and forward-mode evaluation.

Grammar (whitespace is insignificant)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' exponent)?
    exponent:= '-'? NUMBER | '(' '-'? NUMBER ')'
    atom    := NUMBER | NAME | FUNC '(' expr ')' | '(' expr ')'

``FUNC`` is one of sqrt, sin, cos, exp, ln.  ``NAME`` must be a declared
coordinate or (optionally) a named constant, which is substituted by its value.

Evaluation is done with :class:`DualVector` numbers carrying the value and the
gradient with respect to every chart coordinate, so first partial derivatives
are exact up to rounding.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import DomainError, ExprSyntaxError, UnknownIdentifierError

FUNCTIONS = ("sqrt", "sin", "cos", "exp", "ln")


class DualVector:
    """A value together with its gradient with respect to the chart coordinates."""

    __slots__ = ("value", "gradient")

    def __init__(self, value: float, gradient: np.ndarray):
        self.value = float(value)
        self.gradient = gradient

    @classmethod
    def constant(cls, value: float, n: int) -> DualVector:
        return cls(value, np.zeros(n))

    @classmethod
    def variable(cls, value: float, index: int, n: int) -> DualVector:
        g = np.zeros(n)
        g[index] = 1.0
        return cls(value, g)

    def __add__(self, other: DualVector) -> DualVector:
        return DualVector(self.value + other.value, self.gradient + other.gradient)

    def __sub__(self, other: DualVector) -> DualVector:
        return DualVector(self.value - other.value, self.gradient - other.gradient)

    def __mul__(self, other: DualVector) -> DualVector:
        return DualVector(
            self.value * other.value,
            self.gradient * other.value + self.value * other.gradient,
        )

    def __truediv__(self, other: DualVector) -> DualVector:
        if other.value == 0.0:
            raise DomainError("division by zero")
        q = self.value / other.value
        return DualVector(q, (self.gradient - q * other.gradient) / other.value)

    def __neg__(self) -> DualVector:
        return DualVector(-self.value, -self.gradient)

    def __repr__(self) -> str:
        return f"DualVector({self.value!r}, {self.gradient.tolist()!r})"


# ---------------------------------------------------------------------------
# AST


class Expr:
    """Base class of expression nodes.

    Nodes are immutable. Arithmetic operators build new (lightly folded) nodes,
    which is how composite fields such as ``J^i_j X^j`` are assembled.
    """

    __slots__ = ()

    def __add__(self, other) -> Expr:
        return add(self, as_expr(other))

    def __radd__(self, other) -> Expr:
        return add(as_expr(other), self)

    def __sub__(self, other) -> Expr:
        return sub(self, as_expr(other))

    def __rsub__(self, other) -> Expr:
        return sub(as_expr(other), self)

    def __mul__(self, other) -> Expr:
        return mul(self, as_expr(other))

    def __rmul__(self, other) -> Expr:
        return mul(as_expr(other), self)

    def __truediv__(self, other) -> Expr:
        return div(self, as_expr(other))

    def __rtruediv__(self, other) -> Expr:
        return div(as_expr(other), self)

    def __neg__(self) -> Expr:
        return neg(self)

    def __pow__(self, exponent) -> Expr:
        if isinstance(exponent, Expr):
            raise TypeError("only literal real exponents are supported")
        return Pow(self, float(exponent))

    def __str__(self) -> str:
        return to_source(self)


@dataclass(frozen=True, eq=True, repr=True)
class Num(Expr):
    value: float


@dataclass(frozen=True, eq=True, repr=True)
class Var(Expr):
    name: str
    index: int


@dataclass(frozen=True, eq=True, repr=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True, eq=True, repr=True)
class BinOp(Expr):
    op: str  # one of + - * /
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True, repr=True)
class Pow(Expr):
    base: Expr
    exponent: float


@dataclass(frozen=True, eq=True, repr=True)
class Call(Expr):
    func: str
    arg: Expr


ZERO = Num(0.0)
ONE = Num(1.0)


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, float, np.floating, np.integer)):
        return Num(float(x))
    raise TypeError(f"cannot convert {type(x).__name__} to Expr")


def _is_num(e: Expr, v: float | None = None) -> bool:
    return isinstance(e, Num) and (v is None or e.value == v)


# Folding only removes neutral elements and combines literals; no algebra.
def add(a: Expr, b: Expr) -> Expr:
    if _is_num(a) and _is_num(b):
        return Num(a.value + b.value)
    if _is_num(a, 0.0):
        return b
    if _is_num(b, 0.0):
        return a
    return BinOp("+", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if _is_num(a) and _is_num(b):
        return Num(a.value - b.value)
    if _is_num(b, 0.0):
        return a
    if _is_num(a, 0.0):
        return neg(b)
    return BinOp("-", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if _is_num(a) and _is_num(b):
        return Num(a.value * b.value)
    if _is_num(a, 0.0) or _is_num(b, 0.0):
        return ZERO
    if _is_num(a, 1.0):
        return b
    if _is_num(b, 1.0):
        return a
    return BinOp("*", a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is_num(b, 0.0):
        raise ZeroDivisionError("division by the literal 0")
    if _is_num(a) and _is_num(b):
        return Num(a.value / b.value)
    if _is_num(b, 1.0):
        return a
    if _is_num(a, 0.0):
        return ZERO
    return BinOp("/", a, b)


def neg(a: Expr) -> Expr:
    if isinstance(a, Num):
        return Num(-a.value)
    return Neg(a)


def is_constant(e: Expr) -> bool:
    """True when the expression references no coordinate."""
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            return False
        if isinstance(node, Neg):
            stack.append(node.arg)
        elif isinstance(node, BinOp):
            stack.extend((node.left, node.right))
        elif isinstance(node, Pow):
            stack.append(node.base)
        elif isinstance(node, Call):
            stack.append(node.arg)
    return True


# ---------------------------------------------------------------------------
# Serialization

_PREC_ADD, _PREC_MUL, _PREC_UNARY, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _num_text(v: float) -> str:
    if not math.isfinite(v):
        raise ValueError(f"non-finite literal {v!r}")
    if float(v).is_integer() and abs(v) < 2.0**53:
        return str(int(v))
    return repr(float(v))


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC_ADD if e.op in "+-" else _PREC_MUL
    if isinstance(e, Neg):
        return _PREC_UNARY
    if isinstance(e, Pow):
        return _PREC_POW
    if isinstance(e, Num) and (e.value < 0 or math.copysign(1.0, e.value) < 0):
        return _PREC_UNARY
    return _PREC_ATOM


def to_source(e: Expr) -> str:
    """Serialize to DSL text that parses back to the same tree."""

    def wrap(child: Expr, min_prec: int) -> str:
        text = to_source(child)
        return f"({text})" if _prec(child) < min_prec else text

    if isinstance(e, Num):
        return _num_text(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return "-" + wrap(e.arg, _PREC_UNARY)
    if isinstance(e, BinOp):
        p = _PREC_ADD if e.op in "+-" else _PREC_MUL
        return f"{wrap(e.left, p)} {e.op} {wrap(e.right, p + 1)}"
    if isinstance(e, Pow):
        return f"{wrap(e.base, _PREC_ATOM)}^{_num_text(e.exponent)}"
    if isinstance(e, Call):
        return f"{e.func}({to_source(e.arg)})"
    raise TypeError(f"unknown node {e!r}")


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op><=|>=|[-+*/^()<>])"
    r")"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # num | name | op | end
    text: str
    offset: int


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        if source[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(source, pos)
        if m is None or m.lastgroup is None:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}", source, pos)
        kind = m.lastgroup
        tokens.append(_Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(_Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, source: str, coords: Sequence[str], constants: Mapping[str, float]):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0
        self.coords = {name: k for k, name in enumerate(coords)}
        self.constants = dict(constants)

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: _Token | None = None):
        tok = tok or self.tok
        return ExprSyntaxError(message, self.source, tok.offset)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.parse_term())
        return node

    def parse_term(self) -> Expr:
        node = self.parse_unary()
        while self.tok.kind == "op" and self.tok.text in ("*", "/"):
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.parse_unary())
        return node

    def parse_unary(self) -> Expr:
        if self.accept("-"):
            return Neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        if self.accept("^"):
            return Pow(base, self.parse_exponent())
        return base

    def parse_exponent(self) -> float:
        paren = self.accept("(")
        sign = -1.0 if self.accept("-") else 1.0
        if self.tok.kind != "num":
            raise self.error("exponent must be a numeric literal")
        value = sign * float(self.tok.text)
        self.i += 1
        if paren:
            self.expect(")")
        if self.tok.kind == "op" and self.tok.text == "^":
            raise self.error("chained powers are not supported; use parentheses")
        return value

    def parse_atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(float(tok.text))
        if tok.kind == "name":
            self.i += 1
            if tok.text in FUNCTIONS:
                self.expect("(")
                arg = self.parse_expr()
                self.expect(")")
                return Call(tok.text, arg)
            if tok.text in self.coords:
                return Var(tok.text, self.coords[tok.text])
            if tok.text in self.constants:
                return Num(float(self.constants[tok.text]))
            raise UnknownIdentifierError(
                f"unknown identifier {tok.text!r}", self.source, tok.offset
            )
        if self.accept("("):
            node = self.parse_expr()
            self.expect(")")
            return node
        if tok.kind == "end":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected token {tok.text!r}")


def _check_coords(coords: Sequence[str]) -> None:
    if not coords:
        raise ValueError("at least one coordinate name is required")
    if len(set(coords)) != len(coords):
        raise ValueError(f"coordinate names must be distinct: {list(coords)}")


def parse(source: str, coords: Sequence[str], constants: Mapping[str, float] | None = None) -> Expr:
    """Parse DSL text into an expression tree over ``coords``.

    ``constants`` maps extra names to numbers (coordinates shadow constants).
    """
    _check_coords(coords)
    if not source or not source.strip():
        raise ExprSyntaxError("empty expression", source, 0)
    p = _Parser(source, coords, constants or {})
    node = p.parse_expr()
    if p.tok.kind != "end":
        raise p.error(f"unexpected token {p.tok.text!r}")
    return node


@dataclass(frozen=True)
class Predicate:
    """``left op right`` comparison, or a bare expression when ``op`` is None."""

    left: Expr
    op: str | None = None
    right: Expr | None = None

    def holds(self, point: Sequence[float]) -> bool:
        lv = eval_dual(self.left, point).value
        if self.op is None:
            return lv != 0.0
        rv = eval_dual(self.right, point).value
        return {
            "<": lv < rv,
            "<=": lv <= rv,
            ">": lv > rv,
            ">=": lv >= rv,
        }[self.op]


def parse_predicate(
    source: str, coords: Sequence[str], constants: Mapping[str, float] | None = None
) -> Predicate:
    """Parse ``expr [cmp expr]`` where cmp is one of < <= > >=."""
    _check_coords(coords)
    if not source or not source.strip():
        raise ExprSyntaxError("empty expression", source, 0)
    p = _Parser(source, coords, constants or {})
    left = p.parse_expr()
    if p.tok.kind == "op" and p.tok.text in ("<", "<=", ">", ">="):
        op = p.tok.text
        p.i += 1
        right = p.parse_expr()
        pred = Predicate(left, op, right)
    else:
        pred = Predicate(left)
    if p.tok.kind != "end":
        raise p.error(f"unexpected token {p.tok.text!r}")
    return pred


# ---------------------------------------------------------------------------
# Evaluation


def _fail(message: str, node: Expr, point) -> DomainError:
    return DomainError(message, to_source(node), point)


def _finite(d: DualVector, node: Expr, point) -> DualVector:
    if not (math.isfinite(d.value) and np.all(np.isfinite(d.gradient))):
        raise _fail("non-finite result", node, point)
    return d


class PointEval:
    """Memoizing evaluator bound to one point of the chart.

    Composite fields share subtrees (the entries of J appear in JX, l, lJY, ...),
    so results are cached per node for the lifetime of this object. Nodes are
    kept alive by the cache so ``id`` keys cannot be recycled.
    """

    __slots__ = ("point", "n", "_cache")

    def __init__(self, point: Sequence[float]):
        self.point = np.asarray(point, dtype=float)
        if self.point.ndim != 1:
            raise ValueError("point must be a 1-D sequence of coordinates")
        self.n = self.point.shape[0]
        self._cache: dict[int, tuple[Expr, DualVector]] = {}

    def __call__(self, e: Expr) -> DualVector:
        hit = self._cache.get(id(e))
        if hit is not None:
            return hit[1]
        d = self._eval(e)
        self._cache[id(e)] = (e, d)
        return d

    def value(self, e: Expr) -> float:
        return self(e).value

    def _eval(self, e: Expr) -> DualVector:
        n, point = self.n, self.point
        if isinstance(e, Num):
            return DualVector.constant(e.value, n)
        if isinstance(e, Var):
            if e.index >= n:
                raise ValueError(f"coordinate {e.name!r} outside a {n}-dimensional point")
            return DualVector.variable(point[e.index], e.index, n)
        if isinstance(e, Neg):
            return -self(e.arg)
        if isinstance(e, BinOp):
            a, b = self(e.left), self(e.right)
            if e.op == "+":
                return a + b
            if e.op == "-":
                return a - b
            if e.op == "*":
                return a * b
            if b.value == 0.0:
                raise _fail("division by zero", e, point)
            return _finite(a / b, e, point)
        if isinstance(e, Pow):
            return self._pow(e)
        if isinstance(e, Call):
            return self._call(e)
        raise TypeError(f"unknown node {e!r}")

    def _pow(self, e: Pow) -> DualVector:
        base = self(e.base)
        k = e.exponent
        x = base.value
        if k == 0.0:
            return DualVector.constant(1.0, self.n)
        if k == 1.0:
            return base
        integral = float(k).is_integer()
        if x < 0.0 and not integral:
            raise _fail("negative base with non-integer exponent", e, self.point)
        if x == 0.0 and k < 1.0:
            raise _fail("zero base with exponent below 1", e, self.point)
        value = x**k
        slope = k * x ** (k - 1.0)
        return _finite(DualVector(value, slope * base.gradient), e, self.point)

    def _call(self, e: Call) -> DualVector:
        u = self(e.arg)
        x = u.value
        f = e.func
        if f == "sqrt":
            if x <= 0.0:
                raise _fail(
                    "sqrt of negative value" if x < 0.0 else "sqrt not differentiable at 0",
                    e,
                    self.point,
                )
            r = math.sqrt(x)
            return DualVector(r, u.gradient / (2.0 * r))
        if f == "ln":
            if x <= 0.0:
                raise _fail("ln of non-positive value", e, self.point)
            return DualVector(math.log(x), u.gradient / x)
        if f == "exp":
            try:
                r = math.exp(x)
            except OverflowError:
                raise _fail("exp overflow", e, self.point) from None
            return _finite(DualVector(r, r * u.gradient), e, self.point)
        if f == "sin":
            return DualVector(math.sin(x), math.cos(x) * u.gradient)
        if f == "cos":
            return DualVector(math.cos(x), -math.sin(x) * u.gradient)
        raise TypeError(f"unknown function {f!r}")


def eval_dual(e: Expr, point: Sequence[float] | PointEval) -> DualVector:
    """Value and exact gradient of ``e`` at ``point``."""
    ev = point if isinstance(point, PointEval) else PointEval(point)
    return ev(e)


def at(point: Sequence[float] | PointEval) -> PointEval:
    """Reuse an existing evaluator or bind a fresh one to ``point``."""
    return point if isinstance(point, PointEval) else PointEval(point)

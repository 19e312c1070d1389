"""Tensor fields on a single coordinate chart, Lie brackets and Nijenhuis tensors.

All fields store their components as :mod:`metalgeom.expr` trees. Products such
as ``JX`` are built as new trees, so the derivatives needed by brackets are
exact. Evaluation functions take either a point or a
:class:`~metalgeom.expr.PointEval`; passing the same ``PointEval`` to several
calls shares the per-point cache.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .expr import FUNCTIONS, ONE, ZERO, Expr, Num, PointEval, as_expr, at, is_constant, parse

Point = Sequence[float] | PointEval


@dataclass(frozen=True)
class Chart:
    coords: tuple[str, ...]

    def __post_init__(self):
        coords = tuple(self.coords)
        object.__setattr__(self, "coords", coords)
        if not coords:
            raise ValueError("a chart needs at least one coordinate")
        if len(set(coords)) != len(coords):
            raise ValueError(f"coordinate names must be distinct: {list(coords)}")
        for name in coords:
            if not name.isidentifier() or name in FUNCTIONS:
                raise ValueError(f"invalid coordinate name {name!r}")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def parse(self, source: str | float, constants: Mapping[str, float] | None = None) -> Expr:
        if isinstance(source, (int, float)):
            return Num(float(source))
        return parse(source, self.coords, constants)

    def coordinate(self, i: int) -> Expr:
        return parse(self.coords[i], self.coords)


def max_norm(v) -> float:
    a = np.abs(np.asarray(v))
    return float(a.max()) if a.size else 0.0


# ---------------------------------------------------------------------------
# vector fields


@dataclass(frozen=True)
class VectorField:
    """X = X^i d/dx^i with expression components."""

    chart: Chart
    components: tuple[Expr, ...]

    def __post_init__(self):
        comps = tuple(as_expr(c) for c in self.components)
        object.__setattr__(self, "components", comps)
        if len(comps) != self.chart.dim:
            raise ValueError(f"expected {self.chart.dim} components, got {len(comps)}")

    @classmethod
    def parse(cls, chart: Chart, sources: Sequence, constants=None) -> VectorField:
        return cls(chart, tuple(chart.parse(s, constants) for s in sources))

    @classmethod
    def frame(cls, chart: Chart, i: int) -> VectorField:
        """Coordinate vector field d/dx^i."""
        return cls(chart, tuple(ONE if k == i else ZERO for k in range(chart.dim)))

    @classmethod
    def constant(cls, chart: Chart, values: Sequence[float]) -> VectorField:
        return cls(chart, tuple(Num(float(v)) for v in values))

    def value(self, p: Point) -> np.ndarray:
        ev = at(p)
        return np.array([ev(c).value for c in self.components])

    def jet(self, p: Point) -> tuple[np.ndarray, np.ndarray]:
        """Values and Jacobian ``D[i, j] = d_j X^i`` at ``p``."""
        ev = at(p)
        duals = [ev(c) for c in self.components]
        return np.array([d.value for d in duals]), np.array([d.gradient for d in duals])

    def derivative_of(self, f: Expr, p: Point) -> float:
        """X(f) = X^j d_j f at p."""
        ev = at(p)
        return float(self.value(ev) @ ev(f).gradient)

    def scale(self, f) -> VectorField:
        f = as_expr(f)
        return VectorField(self.chart, tuple(f * c for c in self.components))

    def __add__(self, other: VectorField) -> VectorField:
        return VectorField(self.chart, tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: VectorField) -> VectorField:
        return VectorField(self.chart, tuple(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> VectorField:
        return VectorField(self.chart, tuple(-c for c in self.components))

    def __mul__(self, f) -> VectorField:
        return self.scale(f)

    __rmul__ = __mul__


def frames(chart: Chart) -> list[VectorField]:
    return [VectorField.frame(chart, i) for i in range(chart.dim)]


# ---------------------------------------------------------------------------
# matrix-valued fields


class _MatrixField:
    chart: Chart
    entries: tuple[tuple[Expr, ...], ...]

    def _normalize(self):
        rows = tuple(tuple(as_expr(e) for e in row) for row in self.entries)
        object.__setattr__(self, "entries", rows)
        n = self.chart.dim
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError(f"expected a {n}x{n} array of components")

    @classmethod
    def parse(cls, chart: Chart, rows: Sequence[Sequence], constants=None):
        return cls(chart, tuple(tuple(chart.parse(s, constants) for s in row) for row in rows))

    @classmethod
    def constant(cls, chart: Chart, matrix) -> _MatrixField:
        m = np.asarray(matrix, dtype=float)
        return cls(chart, tuple(tuple(Num(float(v)) for v in row) for row in m))

    @classmethod
    def identity(cls, chart: Chart):
        return cls.constant(chart, np.eye(chart.dim))

    @classmethod
    def zero(cls, chart: Chart):
        return cls.constant(chart, np.zeros((chart.dim, chart.dim)))

    def matrix(self, p: Point) -> np.ndarray:
        ev = at(p)
        return np.array([[ev(e).value for e in row] for row in self.entries])

    def is_constant(self) -> bool:
        return all(is_constant(e) for row in self.entries for e in row)


@dataclass(frozen=True)
class TensorField11(_MatrixField):
    """(1,1)-tensor field; column j holds the components of the image of d/dx^j."""

    chart: Chart
    entries: tuple[tuple[Expr, ...], ...]
    # id(X) -> (X, JX); holding X keeps its id from being reused
    _images: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        self._normalize()

    def apply(self, X: VectorField) -> VectorField:
        """The composite field JX with components J^i_j X^j.

        Results are memoized per field object so repeated evaluations share
        expression nodes (and hence point caches).
        """
        hit = self._images.get(id(X))
        if hit is not None and hit[0] is X:
            return hit[1]
        if len(self._images) > 512:
            self._images.clear()
        n = self.chart.dim
        comps = []
        for i in range(n):
            acc: Expr = ZERO
            for j in range(n):
                acc = acc + self.entries[i][j] * X.components[j]
            comps.append(acc)
        image = VectorField(self.chart, tuple(comps))
        self._images[id(X)] = (X, image)
        return image

    def compose(self, other: TensorField11) -> TensorField11:
        """self o other, entrywise as expressions."""
        n = self.chart.dim
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc: Expr = ZERO
                for k in range(n):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            rows.append(tuple(row))
        return TensorField11(self.chart, tuple(rows))

    def __matmul__(self, other):
        if isinstance(other, VectorField):
            return self.apply(other)
        if isinstance(other, TensorField11):
            return self.compose(other)
        return NotImplemented

    def _zip(self, other: TensorField11, op) -> TensorField11:
        return TensorField11(
            self.chart,
            tuple(tuple(op(a, b) for a, b in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries)),
        )

    def __add__(self, other: TensorField11) -> TensorField11:
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other: TensorField11) -> TensorField11:
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self) -> TensorField11:
        return TensorField11(self.chart, tuple(tuple(-e for e in row) for row in self.entries))

    def __mul__(self, c) -> TensorField11:
        c = as_expr(c)
        return TensorField11(self.chart, tuple(tuple(c * e for e in row) for row in self.entries))

    __rmul__ = __mul__


@dataclass(frozen=True)
class MetricField(_MatrixField):
    """Symmetric (0,2)-tensor field g_ij."""

    chart: Chart
    entries: tuple[tuple[Expr, ...], ...]

    def __post_init__(self):
        self._normalize()

    def jet(self, p: Point) -> tuple[np.ndarray, np.ndarray]:
        """Values ``G[i, j]`` and derivatives ``dG[i, j, k] = d_k g_ij``."""
        ev = at(p)
        duals = [[ev(e) for e in row] for row in self.entries]
        G = np.array([[d.value for d in row] for row in duals])
        dG = np.array([[d.gradient for d in row] for row in duals])
        return G, dG

    def inner(self, u, v, p: Point) -> float:
        return float(np.asarray(u) @ self.matrix(p) @ np.asarray(v))

    def symmetry_residual(self, p: Point) -> float:
        G = self.matrix(p)
        return max_norm(G - G.T)


@dataclass(frozen=True)
class TensorField12:
    """(1,2)-tensor field Q with Q(X, Y)^k = Q^k_ij X^i Y^j; ``entries[k][i][j]``."""

    chart: Chart
    entries: tuple[tuple[tuple[Expr, ...], ...], ...]

    def __post_init__(self):
        n = self.chart.dim
        ent = tuple(tuple(tuple(as_expr(e) for e in row) for row in blk) for blk in self.entries)
        object.__setattr__(self, "entries", ent)
        if len(ent) != n or any(len(b) != n or any(len(r) != n for r in b) for b in ent):
            raise ValueError(f"expected a {n}x{n}x{n} array of components")

    @classmethod
    def parse(cls, chart: Chart, blocks, constants=None) -> TensorField12:
        return cls(
            chart,
            tuple(tuple(tuple(chart.parse(s, constants) for s in row) for row in blk) for blk in blocks),
        )

    @classmethod
    def zero(cls, chart: Chart) -> TensorField12:
        n = chart.dim
        return cls(chart, tuple(tuple(tuple(ZERO for _ in range(n)) for _ in range(n)) for _ in range(n)))

    def array(self, p: Point) -> np.ndarray:
        ev = at(p)
        return np.array([[[ev(e).value for e in row] for row in blk] for blk in self.entries])

    def apply(self, u, v, p: Point) -> np.ndarray:
        """Q(u, v) at p for component vectors u, v."""
        return np.einsum("kij,i,j->k", self.array(p), np.asarray(u), np.asarray(v))


# ---------------------------------------------------------------------------
# operations


def apply(J: TensorField11, X: VectorField, p: Point) -> np.ndarray:
    """(JX)(p) = J(p) X(p)."""
    ev = at(p)
    return J.matrix(ev) @ X.value(ev)


def lie_bracket(X: VectorField, Y: VectorField, p: Point) -> np.ndarray:
    """[X, Y]^i = X^j d_j Y^i - Y^j d_j X^i at p."""
    ev = at(p)
    xv, dX = X.jet(ev)
    yv, dY = Y.jet(ev)
    return dY @ xv - dX @ yv


def nijenhuis(J: TensorField11, X: VectorField, Y: VectorField, p: Point) -> np.ndarray:
    """N_J(X,Y) = J^2[X,Y] + [JX,JY] - J[JX,Y] - J[X,JY] at p."""
    ev = at(p)
    Jp = J.matrix(ev)
    JX, JY = J.apply(X), J.apply(Y)
    return (
        Jp @ (Jp @ lie_bracket(X, Y, ev))
        + lie_bracket(JX, JY, ev)
        - Jp @ lie_bracket(JX, Y, ev)
        - Jp @ lie_bracket(X, JY, ev)
    )


def nijenhuis_scaling_check(J: TensorField11, a, b, X: VectorField, Y: VectorField, p: Point) -> float:
    """Max-norm of N_F(X,Y) - 4/(a^2+4b) N_J(X,Y) with F the product structure of J."""
    from .metallic import MetallicParams, to_product

    params = MetallicParams.coerce(a, b)
    ev = at(p)
    F = to_product(J, params, check=False)
    nf = nijenhuis(F, X, Y, ev)
    nj = nijenhuis(J, X, Y, ev)
    return max_norm(nf - (4.0 / params.disc**2) * nj)

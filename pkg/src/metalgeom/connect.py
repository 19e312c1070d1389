"""Linear connections on a chart and the connections built from a metallic structure.

Convention: (nabla_X Y)^k = X^j d_j Y^k + Gamma^k_ij X^i Y^j, with the
Christoffel array indexed ``gamma[k, i, j]``.

Connections derived from a base connection (Schouten, Vranceanu, Obata) are
kept as evaluators: they take two vector fields and a point and return the
covariant derivative there. Their coefficients can still be read off with
:meth:`Connection.coefficients`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .chart import Chart, MetricField, Point, TensorField11, TensorField12, VectorField, frames, lie_bracket, max_norm
from .errors import DomainError, PreconditionError
from .expr import Expr, PointEval, at
from .metallic import MetallicParams, to_product
from .verify import DEFAULT_TOL, probe_points, require


class Connection:
    chart: Chart
    tag: str

    def covariant(self, X: VectorField, Y: VectorField, p: Point) -> np.ndarray:
        raise NotImplementedError

    def coefficients(self, p: Point) -> np.ndarray:
        """Gamma[k, i, j] = (nabla_{d_i} d_j)^k at p."""
        ev = at(p)
        fr = frames(self.chart)
        n = self.chart.dim
        out = np.empty((n, n, n))
        for i in range(n):
            for j in range(n):
                out[:, i, j] = self.covariant(fr[i], fr[j], ev)
        return out

    def torsion_residual(self, p: Point) -> float:
        C = self.coefficients(p)
        return max_norm(C - C.transpose(0, 2, 1))


@dataclass(frozen=True)
class ConnectionCoeffs(Connection):
    """Connection given by Christoffel symbols.

    ``christoffel`` maps a :class:`PointEval` to the ``(n, n, n)`` array.
    """

    chart: Chart
    christoffel: Callable[[PointEval], np.ndarray]
    tag: str = "user"
    symmetric: bool | None = None

    @classmethod
    def flat(cls, chart: Chart) -> ConnectionCoeffs:
        n = chart.dim
        zero = np.zeros((n, n, n))
        return cls(chart, lambda ev: zero, tag="flat", symmetric=True)

    @classmethod
    def from_exprs(cls, chart: Chart, gamma, tag: str = "user", symmetric: bool | None = None) -> ConnectionCoeffs:
        """``gamma[k][i][j]`` given as expressions."""
        q = TensorField12(chart, gamma)
        return cls(chart, q.array, tag=tag, symmetric=symmetric)

    @classmethod
    def parse(cls, chart: Chart, blocks, constants=None, **kw) -> ConnectionCoeffs:
        return cls.from_exprs(chart, TensorField12.parse(chart, blocks, constants).entries, **kw)

    def gamma(self, p: Point) -> np.ndarray:
        return np.asarray(self.christoffel(at(p)), dtype=float)

    def covariant(self, X: VectorField, Y: VectorField, p: Point) -> np.ndarray:
        ev = at(p)
        xv = X.value(ev)
        yv, dY = Y.jet(ev)
        return dY @ xv + np.einsum("kij,i,j->k", self.gamma(ev), xv, yv)

    def coefficients(self, p: Point) -> np.ndarray:
        return self.gamma(p)


@dataclass(frozen=True)
class DerivedConnection(Connection):
    chart: Chart
    evaluator: Callable[[VectorField, VectorField, PointEval], np.ndarray]
    tag: str = "user"

    def covariant(self, X: VectorField, Y: VectorField, p: Point) -> np.ndarray:
        return np.asarray(self.evaluator(X, Y, at(p)))


def covariant_derivative(conn: Connection, X: VectorField, Y: VectorField, p: Point) -> np.ndarray:
    return conn.covariant(X, Y, p)


def levi_civita(g: MetricField) -> ConnectionCoeffs:
    """Christoffel symbols of g, solved pointwise from the metric and its first derivatives."""
    n = g.chart.dim

    def christoffel(ev: PointEval) -> np.ndarray:
        G, dG = g.jet(ev)  # dG[i, j, k] = d_k g_ij
        # T[l, i, j] = d_i g_jl + d_j g_il - d_l g_ij
        T = dG.transpose(1, 2, 0) + dG.transpose(1, 0, 2) - dG.transpose(2, 0, 1)
        try:
            sol = np.linalg.solve(G, T.reshape(n, n * n))
        except np.linalg.LinAlgError:
            raise DomainError("singular metric", point=ev.point) from None
        cond = np.linalg.cond(G)
        if not np.isfinite(cond) or cond > 1e12:
            raise DomainError(f"ill-conditioned metric (condition number {cond:.3e})", point=ev.point)
        return 0.5 * sol.reshape(n, n, n)

    return ConnectionCoeffs(g.chart, christoffel, tag="levi-civita", symmetric=True)


def _require_projector_pair(l: TensorField11, m: TensorField11, points, tol: float) -> None:
    n = l.chart.dim
    eye = np.eye(n)

    def residual(ev):
        lp, mp = l.matrix(ev), m.matrix(ev)
        return max(
            max_norm(lp @ lp - lp),
            max_norm(mp @ mp - mp),
            max_norm(lp @ mp),
            max_norm(mp @ lp),
            max_norm(lp + mp - eye),
        )

    require("complementary projectors (l^2 = l, m^2 = m, lm = ml = 0, l + m = I)", residual,
            points if points is not None else probe_points(n), tol)


def schouten(
    conn: Connection, l: TensorField11, m: TensorField11, points=None, tol: float = DEFAULT_TOL, check: bool = True
) -> DerivedConnection:
    """nabla~_X Y = l(nabla_X lY) + m(nabla_X mY)."""
    if check:
        _require_projector_pair(l, m, points, tol)

    def evaluator(X, Y, ev):
        return l.matrix(ev) @ conn.covariant(X, l.apply(Y), ev) + m.matrix(ev) @ conn.covariant(X, m.apply(Y), ev)

    return DerivedConnection(l.chart, evaluator, tag="schouten")


def vranceanu(
    conn: Connection, l: TensorField11, m: TensorField11, points=None, tol: float = DEFAULT_TOL, check: bool = True
) -> DerivedConnection:
    """nabla^_X Y = l(nabla_{lX} lY) + m(nabla_{mX} mY) + l[mX, lY] + m[lX, mY]."""
    if check:
        _require_projector_pair(l, m, points, tol)

    def evaluator(X, Y, ev):
        lX, mX, lY, mY = l.apply(X), m.apply(X), l.apply(Y), m.apply(Y)
        lp, mp = l.matrix(ev), m.matrix(ev)
        return (
            lp @ conn.covariant(lX, lY, ev)
            + mp @ conn.covariant(mX, mY, ev)
            + lp @ lie_bracket(mX, lY, ev)
            + mp @ lie_bracket(lX, mY, ev)
        )

    return DerivedConnection(l.chart, evaluator, tag="vranceanu")


def nabla_tensor(conn: Connection, A: TensorField11, X: VectorField, Y: VectorField, p: Point) -> np.ndarray:
    """(nabla_X A)Y = nabla_X(AY) - A(nabla_X Y)."""
    ev = at(p)
    return conn.covariant(X, A.apply(Y), ev) - A.matrix(ev) @ conn.covariant(X, Y, ev)


def nabla_J(conn: Connection, J: TensorField11, X: VectorField, Y: VectorField, p: Point) -> np.ndarray:
    return nabla_tensor(conn, J, X, Y, p)


def delta_J(conn: Connection, J: TensorField11, X: VectorField, Y: VectorField, p: Point) -> np.ndarray:
    """(Delta J)(X,Y) = J nabla_X Y - J nabla_Y X - nabla_{JX} Y + nabla_Y (JX)."""
    ev = at(p)
    Jp = J.matrix(ev)
    JX = J.apply(X)
    return (
        Jp @ conn.covariant(X, Y, ev)
        - Jp @ conn.covariant(Y, X, ev)
        - conn.covariant(JX, Y, ev)
        + conn.covariant(Y, JX, ev)
    )


def obata_connection(
    base: Connection,
    J: TensorField11,
    params: MetallicParams,
    Q: TensorField12 | None = None,
    points=None,
    tol: float = DEFAULT_TOL,
    check: bool = True,
) -> DerivedConnection:
    """Connection with nabla J = 0 built from an arbitrary base connection.

    nabla_X Y = [(a^2+2b) D_X Y + 2J D_X(JY) - aJ D_X Y - a D_X(JY)] / (a^2+4b)
                + (Q(X,Y) + F Q(X, FY)) / 2

    with D the base connection and F the almost product structure of J.
    ``Q`` defaults to zero.
    """
    F = to_product(J, params, points=points, tol=tol, check=check)
    a, b = params.a, params.b
    c = 1.0 / (a * a + 4.0 * b)

    def evaluator(X, Y, ev):
        Jp = J.matrix(ev)
        DY = base.covariant(X, Y, ev)
        DJY = base.covariant(X, J.apply(Y), ev)
        out = c * ((a * a + 2.0 * b) * DY + 2.0 * Jp @ DJY - a * Jp @ DY - a * DJY)
        if Q is not None:
            xv, yv = X.value(ev), Y.value(ev)
            Fp = F.matrix(ev)
            out = out + 0.5 * (Q.apply(xv, yv, ev) + Fp @ Q.apply(xv, Fp @ yv, ev))
        return out

    return DerivedConnection(J.chart, evaluator, tag="obata")


def obata_operator(Q: TensorField12, F: TensorField11, X: VectorField, Y: VectorField, p: Point) -> np.ndarray:
    """(O_F Q)(X, Y) = (Q(X,Y) + F Q(X, FY)) / 2 at p."""
    ev = at(p)
    xv, yv, Fp = X.value(ev), Y.value(ev), F.matrix(ev)
    return 0.5 * (Q.apply(xv, yv, ev) + Fp @ Q.apply(xv, Fp @ yv, ev))


def nijenhuis_via_connection(
    conn: Connection, F: TensorField11, X: VectorField, Y: VectorField, p: Point, sym_tol: float = 1e-10
) -> np.ndarray:
    """N_F(X,Y) = (nabla_{FX}F)Y - (nabla_{FY}F)X - F(nabla_X F)Y + F(nabla_Y F)X.

    Valid only for torsion-free connections; an asymmetric one is rejected.
    """
    ev = at(p)
    if conn.torsion_residual(ev) > sym_tol:
        raise PreconditionError("connection is not symmetric", ev.point, conn.torsion_residual(ev))
    Fp = F.matrix(ev)
    FX, FY = F.apply(X), F.apply(Y)
    return (
        nabla_tensor(conn, F, FX, Y, ev)
        - nabla_tensor(conn, F, FY, X, ev)
        - Fp @ nabla_tensor(conn, F, X, Y, ev)
        + Fp @ nabla_tensor(conn, F, Y, X, ev)
    )


# ---------------------------------------------------------------------------
# numerical axiom checks


def leibniz_residual(conn: Connection, X: VectorField, Y: VectorField, f: Expr, p: Point) -> float:
    """|nabla_X(fY) - (Xf) Y - f nabla_X Y|."""
    ev = at(p)
    lhs = conn.covariant(X, Y.scale(f), ev)
    rhs = X.derivative_of(f, ev) * Y.value(ev) + ev(f).value * conn.covariant(X, Y, ev)
    return max_norm(lhs - rhs)


def function_linearity_residual(conn: Connection, X: VectorField, Y: VectorField, f: Expr, p: Point) -> float:
    """|nabla_{fX} Y - f nabla_X Y|."""
    ev = at(p)
    return max_norm(conn.covariant(X.scale(f), Y, ev) - ev(f).value * conn.covariant(X, Y, ev))


def additivity_residual(conn: Connection, X1, X2, Y1, Y2, p: Point) -> float:
    ev = at(p)
    r1 = conn.covariant(X1 + X2, Y1, ev) - conn.covariant(X1, Y1, ev) - conn.covariant(X2, Y1, ev)
    r2 = conn.covariant(X1, Y1 + Y2, ev) - conn.covariant(X1, Y1, ev) - conn.covariant(X1, Y2, ev)
    return max(max_norm(r1), max_norm(r2))


def metric_compatibility_residual(g: MetricField, conn: Connection, p: Point) -> float:
    """max_ijk |d_k g_ij - g(nabla_k e_i, e_j) - g(e_i, nabla_k e_j)|."""
    ev = at(p)
    G, dG = g.jet(ev)
    C = conn.coefficients(ev)  # C[c, k, i] = (nabla_{d_k} d_i)^c
    term1 = np.einsum("cki,cj->ijk", C, G)
    term2 = np.einsum("ckj,ic->ijk", C, G)
    return max_norm(dG - term1 - term2)


def distribution_parallel_residual(
    conn: Connection, l: TensorField11, m: TensorField11, X: VectorField, Y: VectorField, p: Point
) -> float:
    """max(|m nabla_X(lY)|, |l nabla_X(mY)|): zero when L and M are nabla-parallel."""
    ev = at(p)
    return max(
        max_norm(m.matrix(ev) @ conn.covariant(X, l.apply(Y), ev)),
        max_norm(l.matrix(ev) @ conn.covariant(X, m.apply(Y), ev)),
    )

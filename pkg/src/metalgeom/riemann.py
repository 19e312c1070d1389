"""Checks for metallic (semi-)Riemannian structures (g, J)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chart import MetricField, TensorField11, VectorField, frames, max_norm, nijenhuis
from .connect import levi_civita, nabla_tensor
from .metallic import MetallicParams, to_product
from .verify import DEFAULT_TOL, CheckResult, probe_points, sweep


def _pts(dim: int, points) -> list:
    return list(points) if points is not None else probe_points(dim)


def g_symmetry_residual(g: MetricField, A: TensorField11, p) -> float:
    """max_ij |g(A e_i, e_j) - g(e_i, A e_j)| over coordinate frame pairs."""
    G, Ap = g.matrix(p), A.matrix(p)
    n = G.shape[0]
    worst = 0.0
    for i in range(n):
        for j in range(n):
            ei, ej = np.eye(n)[i], np.eye(n)[j]
            worst = max(worst, abs((Ap @ ei) @ G @ ej - ei @ G @ (Ap @ ej)))
    return worst


def g_symmetry_matrix_residual(G, A) -> float:
    """The same quantity in matrix form, |G A - A^T G|."""
    G, A = np.asarray(G), np.asarray(A)
    return max_norm(G @ A - A.T @ G)


def g_symmetry_check(
    g: MetricField, A: TensorField11, points=None, tol: float = DEFAULT_TOL, name: str = "g_symmetry"
) -> CheckResult:
    return sweep(name, lambda ev: g_symmetry_residual(g, A, ev), _pts(g.chart.dim, points), tol)


@dataclass
class EquivalenceResult:
    J: CheckResult
    F: CheckResult
    agree: bool
    ratio: float | None  # F residual / J residual, expected 2/(2 rho - a)


def equivalence_F_J_symmetry(
    g: MetricField, J: TensorField11, params: MetallicParams, points=None, tol: float = DEFAULT_TOL
) -> EquivalenceResult:
    """g-symmetry of J and of its product structure F, which must agree.

    Since F = (2J - aI)/(2 rho - a), the F residual is the J residual times
    2/(2 rho - a); verdicts are compared at the correspondingly scaled tolerance.
    """
    pts = _pts(g.chart.dim, points)
    F = to_product(J, params, check=False)
    scale = 2.0 / params.disc
    rj = g_symmetry_check(g, J, pts, tol, name="g_symmetry[J]")
    rf = g_symmetry_check(g, F, pts, tol * scale, name="g_symmetry[F]")
    ratio = rf.max_residual / rj.max_residual if rj.max_residual > 0 else None
    return EquivalenceResult(rj, rf, rj.passed == rf.passed, ratio)


def orthogonality_residual(g: MetricField, l: TensorField11, m: TensorField11, p) -> float:
    """max_ij |g(l e_i, m e_j)|."""
    return max_norm(l.matrix(p).T @ g.matrix(p) @ m.matrix(p))


def orthogonality_check(
    g: MetricField, l: TensorField11, m: TensorField11, points=None, tol: float = DEFAULT_TOL
) -> CheckResult:
    return sweep("orthogonality", lambda ev: orthogonality_residual(g, l, m, ev), _pts(g.chart.dim, points), tol)


def _pairs(J: TensorField11, X, Y) -> list[tuple[VectorField, VectorField]]:
    if X is not None and Y is not None:
        return [(X, Y)]
    fr = frames(J.chart)
    return [(fr[i], fr[j]) for i in range(len(fr)) for j in range(len(fr)) if i != j]


def nj_symmetry_residual(J: TensorField11, X: VectorField, Y: VectorField, p) -> float:
    """|N_J(JX, Y) - N_J(X, JY)| at p."""
    return max_norm(nijenhuis(J, J.apply(X), Y, p) - nijenhuis(J, X, J.apply(Y), p))


def nj_symmetry_check(
    J: TensorField11, X: VectorField | None = None, Y: VectorField | None = None, points=None, tol: float = DEFAULT_TOL
) -> CheckResult:
    """N_J(JX, Y) = N_J(X, JY); uses all coordinate frame pairs when X, Y are omitted."""
    pairs = _pairs(J, X, Y)
    return sweep(
        "nj_symmetry",
        lambda ev: max(nj_symmetry_residual(J, x, y, ev) for x, y in pairs),
        _pts(J.chart.dim, points),
        tol,
    )


def locally_product_check(
    g: MetricField, J: TensorField11, params: MetallicParams, points=None, tol: float = DEFAULT_TOL
) -> CheckResult:
    """Is F parallel for the Levi-Civita connection of g?  If so, N_J must vanish too.

    Only that direction is asserted: an integrable J need not be locally
    product, and the note says which case occurred.
    """
    pts = _pts(g.chart.dim, points)
    lc = levi_civita(g)
    F = to_product(J, params, check=False)
    fr = frames(g.chart)
    n = len(fr)

    par = sweep(
        "locally_product",
        lambda ev: max(max_norm(nabla_tensor(lc, F, fr[i], fr[j], ev)) for i in range(n) for j in range(n)),
        pts,
        tol,
    )
    integ = sweep(
        "nijenhuis",
        lambda ev: max((max_norm(nijenhuis(J, fr[i], fr[j], ev)) for i in range(n) for j in range(i + 1, n)), default=0.0),
        pts,
        tol,
    )
    par.details = {"nabla_F": par.max_residual, "nijenhuis": integ.max_residual}
    if par.passed:
        if not integ.passed:
            par.passed = False
            par.note = "F is parallel but N_J does not vanish"
        else:
            par.note = "locally product; integrable"
    else:
        par.note = "not locally product; " + ("integrable anyway" if integ.passed else "not integrable")
    return par

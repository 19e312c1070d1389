"""Seeded random fields for property checks.

All generators take a ``numpy.random.Generator`` so callers control
reproducibility.
"""

from __future__ import annotations

import itertools

import numpy as np

from .chart import Chart, TensorField11, TensorField12, VectorField
from .expr import ONE, ZERO, Call, Expr, Num, Pow, Var


def _monomials(dim: int, degree: int) -> list[tuple[int, ...]]:
    return [e for e in itertools.product(range(degree + 1), repeat=dim) if sum(e) <= degree]


def _monomial(chart: Chart, exps: tuple[int, ...]) -> Expr:
    term: Expr = ONE
    for k, e in enumerate(exps):
        if e == 0:
            continue
        v = Var(chart.coords[k], k)
        term = term * (v if e == 1 else Pow(v, float(e)))
    return term


def random_polynomial(chart: Chart, rng: np.random.Generator, degree: int = 2, scale: float = 1.0) -> Expr:
    """Sum of all monomials of total degree <= ``degree`` with uniform coefficients."""
    poly: Expr = ZERO
    for exps in _monomials(chart.dim, degree):
        poly = poly + Num(float(rng.uniform(-scale, scale))) * _monomial(chart, exps)
    return poly


def random_vector_field(chart: Chart, rng: np.random.Generator, degree: int = 2, scale: float = 1.0) -> VectorField:
    return VectorField(chart, tuple(random_polynomial(chart, rng, degree, scale) for _ in range(chart.dim)))


def random_tensor11(chart: Chart, rng: np.random.Generator, degree: int = 2, scale: float = 1.0) -> TensorField11:
    n = chart.dim
    return TensorField11(
        chart, tuple(tuple(random_polynomial(chart, rng, degree, scale) for _ in range(n)) for _ in range(n))
    )


def random_tensor12(chart: Chart, rng: np.random.Generator, degree: int = 2, scale: float = 1.0) -> TensorField12:
    n = chart.dim
    return TensorField12(
        chart,
        tuple(
            tuple(tuple(random_polynomial(chart, rng, degree, scale) for _ in range(n)) for _ in range(n))
            for _ in range(n)
        ),
    )


def _offset_field(chart: Chart, rng: np.random.Generator, norm: float, scale: float) -> VectorField:
    c = rng.standard_normal(chart.dim)
    c *= norm / np.linalg.norm(c)
    pert = random_vector_field(chart, rng, degree=2, scale=scale)
    return VectorField(chart, tuple(Num(float(ci)) + pi for ci, pi in zip(c, pert.components)))


def random_product_structure(
    chart: Chart, rng: np.random.Generator, symmetric: bool = True, scale: float = 0.2
) -> TensorField11:
    """Smooth field F with F^2 = I identically: F = I - 2 u w^T / (w . u).

    ``u`` is a constant vector of norm 3 plus a degree-2 polynomial
    perturbation, which keeps ``w . u`` away from zero on [-1, 1]^n. With
    ``symmetric`` the reflection is orthogonal (w = u); otherwise ``w`` is an
    independent small perturbation of ``u`` and F is oblique.
    """
    n = chart.dim
    u = _offset_field(chart, rng, 3.0, scale)
    if symmetric:
        w = u
    else:
        d = random_vector_field(chart, rng, degree=1, scale=0.1)
        w = u + d
    denom: Expr = ZERO
    for uk, wk in zip(u.components, w.components):
        denom = denom + uk * wk
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            delta = ONE if i == j else ZERO
            row.append(delta - Num(2.0) * u.components[i] * w.components[j] / denom)
        rows.append(tuple(row))
    return TensorField11(chart, tuple(rows))


def random_metric(chart: Chart, rng: np.random.Generator, scale: float = 0.1) -> "MetricField":
    """Identity plus a small symmetric polynomial perturbation."""
    from .chart import MetricField

    n = chart.dim
    entries = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            p = random_polynomial(chart, rng, degree=2, scale=scale)
            entries[i][j] = entries[j][i] = (ONE + p) if i == j else p
    return MetricField(chart, tuple(tuple(r) for r in entries))


_SAFE_UNARY = ("sin", "cos", "exp", "sqrt", "ln")


def random_expression(chart: Chart, rng: np.random.Generator, depth: int = 3) -> Expr:
    """Random polynomial/rational/elementary expression without singular points.

    Denominators and the arguments of sqrt and ln have the form 1 + q^2, and
    exp only sees bounded arguments via sin, so every real point is safe.
    """
    if depth <= 0 or rng.random() < 0.2:
        if rng.random() < 0.6:
            k = int(rng.integers(chart.dim))
            return Var(chart.coords[k], k)
        return Num(float(np.round(rng.uniform(-3, 3), 3)))
    kind = rng.choice(["+", "-", "*", "/", "pow", "func"])
    if kind in ("+", "-", "*"):
        a = random_expression(chart, rng, depth - 1)
        b = random_expression(chart, rng, depth - 1)
        return {"+": a + b, "-": a - b, "*": a * b}[kind]
    if kind == "/":
        a = random_expression(chart, rng, depth - 1)
        q = random_expression(chart, rng, depth - 1)
        return a / (ONE + Pow(q, 2.0))
    if kind == "pow":
        return Pow(random_expression(chart, rng, depth - 1), float(rng.integers(2, 4)))
    f = str(rng.choice(_SAFE_UNARY))
    arg = random_expression(chart, rng, depth - 1)
    if f in ("sqrt", "ln"):
        return Call(f, ONE + Pow(arg, 2.0))
    if f == "exp":
        return Call(f, Call("sin", arg))
    return Call(f, arg)

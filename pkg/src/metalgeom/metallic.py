"""Metallic structures J^2 = aJ + bI: ratios, conversions and projectors."""

from __future__ import annotations

import enum
import math
import numbers
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .chart import TensorField11, max_norm
from .errors import PreconditionError
from .expr import at
from .verify import DEFAULT_TOL, CheckResult, probe_points, require, sweep

NAMED_MEANS: dict[str, tuple[int, int]] = {
    "golden": (1, 1),
    "silver": (2, 1),
    "bronze": (3, 1),
    "subtle": (4, 1),
    "copper": (1, 2),
    "nickel": (1, 3),
}


def _as_param(name: str, x, allow_real: bool) -> float:
    if isinstance(x, bool) or not isinstance(x, numbers.Real):
        raise ValueError(f"{name} must be a number, got {x!r}")
    x = float(x)
    if not math.isfinite(x) or x <= 0:
        raise ValueError(f"{name} must be positive, got {x!r}")
    if not allow_real and not x.is_integer():
        raise ValueError(f"{name} must be a positive integer, got {x!r} (use allow_real=True to relax)")
    return x


def metallic_ratio(a, b, allow_real: bool = False) -> float:
    """Positive root of x^2 - a x - b."""
    a = _as_param("a", a, allow_real)
    b = _as_param("b", b, allow_real)
    return (a + math.sqrt(a * a + 4.0 * b)) / 2.0


@dataclass(frozen=True)
class MetallicParams:
    a: float
    b: float
    allow_real: bool = False
    rho: float = field(init=False)
    disc: float = field(init=False)  # sqrt(a^2 + 4b) = 2 rho - a

    def __post_init__(self):
        a = _as_param("a", self.a, self.allow_real)
        b = _as_param("b", self.b, self.allow_real)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        disc = math.sqrt(a * a + 4.0 * b)
        object.__setattr__(self, "disc", disc)
        object.__setattr__(self, "rho", (a + disc) / 2.0)

    @classmethod
    def coerce(cls, a, b=None) -> MetallicParams:
        """Accept an existing instance or raw (a, b); non-integers are let through."""
        if isinstance(a, MetallicParams):
            return a
        return cls(a, b, allow_real=not (float(a).is_integer() and float(b).is_integer()))

    @property
    def conjugate_root(self) -> float:
        return self.a - self.rho

    def constants(self) -> dict[str, float]:
        """Names usable inside field expressions."""
        return {"a": self.a, "b": self.b, "rho": self.rho, "disc": self.disc}


def secondary_fibonacci(a: float, b: float, c: float, d: float, count: int) -> list[float]:
    """G(0)=c, G(1)=d, G(k+1) = a G(k) + b G(k-1)."""
    seq = [c, d][:count]
    while len(seq) < count:
        seq.append(a * seq[-1] + b * seq[-2])
    return seq


class StructureKind(enum.Enum):
    """Each kind is annihilated by its own quadratic x^2 + c1 x + c0."""

    METALLIC = "metallic"
    TANGENT_METALLIC = "tangent_metallic"
    COMPLEX_METALLIC = "complex_metallic"

    def coefficients(self, params: MetallicParams) -> tuple[float, float]:
        a, b = params.a, params.b
        if self is StructureKind.METALLIC:
            return -a, -b
        if self is StructureKind.TANGENT_METALLIC:
            return -a, a * a / 4.0
        return -a, (a * a + 2.0 * b) / 2.0

    def ratio(self, params: MetallicParams) -> complex | float:
        if self is StructureKind.METALLIC:
            return params.rho
        if self is StructureKind.TANGENT_METALLIC:
            return tangent_metallic_ratio(params)
        return complex_metallic_ratio(params)


def tangent_metallic_ratio(params: MetallicParams) -> float:
    return params.a / 2.0


def complex_metallic_ratio(params: MetallicParams) -> complex:
    return complex(params.a / 2.0, params.disc / 2.0)


def polynomial_residual(M, params: MetallicParams, kind: StructureKind = StructureKind.METALLIC) -> float:
    """Max-norm of M^2 + c1 M + c0 I for the kind's annihilating quadratic."""
    M = np.asarray(M)
    c1, c0 = kind.coefficients(params)
    return max_norm(M @ M + c1 * M + c0 * np.eye(M.shape[0]))


def metallic_residual(M, a, b) -> float:
    """Max-norm of M^2 - aM - bI."""
    M = np.asarray(M)
    return max_norm(M @ M - a * M - b * np.eye(M.shape[0]))


def annihilating_spectrum_check(Jp, params: MetallicParams) -> float:
    """Max-norm of (Jp - rho I)(Jp - (a - rho) I).

    Zero exactly when the minimal polynomial of Jp divides the metallic
    polynomial, i.e. when the spectrum lies in {rho, a - rho}.
    """
    Jp = np.asarray(Jp)
    eye = np.eye(Jp.shape[0])
    return max_norm((Jp - params.rho * eye) @ (Jp - params.conjugate_root * eye))


def _points(field_: TensorField11, points) -> list:
    return list(points) if points is not None else probe_points(field_.chart.dim)


def is_metallic(
    J: TensorField11, params: MetallicParams, points: Iterable | None = None, tol: float = DEFAULT_TOL
) -> CheckResult:
    return sweep(
        "metallic",
        lambda ev: metallic_residual(J.matrix(ev), params.a, params.b),
        _points(J, points),
        tol,
    )


def _require_metallic(J, params, points, tol):
    require(
        "metallic condition J^2 = aJ + bI",
        lambda ev: metallic_residual(J.matrix(ev), params.a, params.b),
        _points(J, points),
        tol,
    )


def from_product(
    F: TensorField11, params: MetallicParams, points=None, tol: float = DEFAULT_TOL, check: bool = True
) -> TensorField11:
    """J = (a/2) I + ((2 rho - a)/2) F for an almost product structure F."""
    if check:
        eye = np.eye(F.chart.dim)
        require(
            "almost product condition F^2 = I",
            lambda ev: max_norm(F.matrix(ev) @ F.matrix(ev) - eye),
            _points(F, points),
            tol,
        )
    eye_f = TensorField11.identity(F.chart)
    return eye_f * (params.a / 2.0) + F * (params.disc / 2.0)


def to_product(
    J: TensorField11, params: MetallicParams, points=None, tol: float = DEFAULT_TOL, check: bool = True
) -> TensorField11:
    """F = (2/(2 rho - a)) J - (a/(2 rho - a)) I."""
    if check:
        _require_metallic(J, params, points, tol)
    eye_f = TensorField11.identity(J.chart)
    return J * (2.0 / params.disc) - eye_f * (params.a / params.disc)


def conjugate(J: TensorField11, params: MetallicParams) -> TensorField11:
    """aI - J, the metallic structure with the eigenvalues swapped."""
    return TensorField11.identity(J.chart) * params.a - J


def inverse_structure(J: TensorField11, params: MetallicParams) -> TensorField11:
    """J^-1 = (J - aI)/b, which follows from J(J - aI) = bI."""
    return (J - TensorField11.identity(J.chart) * params.a) * (1.0 / params.b)


def tangent_metallic(
    T: TensorField11, params: MetallicParams, points=None, tol: float = DEFAULT_TOL
) -> TensorField11:
    """J_t = (a/2) I + ((2 rho - a)/2) T for an almost tangent structure (T^2 = 0).

    The result is annihilated by x^2 - a x + a^2/4, not by the metallic
    polynomial; see :attr:`StructureKind.TANGENT_METALLIC`.
    """
    require(
        "almost tangent condition T^2 = 0",
        lambda ev: max_norm(T.matrix(ev) @ T.matrix(ev)),
        _points(T, points),
        tol,
    )
    return TensorField11.identity(T.chart) * (params.a / 2.0) + T * (params.disc / 2.0)


def complex_metallic(C, params: MetallicParams, tol: float = 1e-10) -> np.ndarray:
    """J_c = (a/2) I + ((2 rho - a)/2) C for a constant matrix with C^2 = -I.

    Complex entries are allowed. The result is annihilated by
    x^2 - a x + (a^2 + 2b)/2, with eigenvalues a/2 +- (sqrt(a^2+4b)/2) i.
    """
    C = np.asarray(C)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError("C must be a square matrix")
    eye = np.eye(C.shape[0])
    r = max_norm(C @ C + eye)
    if r > tol:
        raise PreconditionError("almost complex condition C^2 = -I fails", None, r)
    return (params.a / 2.0) * eye + (params.disc / 2.0) * C


def projectors(
    J: TensorField11, params: MetallicParams, points=None, tol: float = DEFAULT_TOL, check: bool = True
) -> tuple[TensorField11, TensorField11]:
    """Projectors (l, m) onto the rho- and (a - rho)-eigendistributions of J."""
    if check:
        _require_metallic(J, params, points, tol)
    eye_f = TensorField11.identity(J.chart)
    k = params.disc
    l = J * (1.0 / k) - eye_f * (params.conjugate_root / k)
    m = eye_f * (params.rho / k) - J * (1.0 / k)
    return l, m


def projector_residuals(J, l, m, params: MetallicParams, p) -> dict[str, float]:
    """Residuals of the projector identities and eigen-relations at one point."""
    ev = at(p)
    Jp, lp, mp = J.matrix(ev), l.matrix(ev), m.matrix(ev)
    eye = np.eye(Jp.shape[0])
    rho, rho_bar = params.rho, params.conjugate_root
    return {
        "l^2 = l": max_norm(lp @ lp - lp),
        "m^2 = m": max_norm(mp @ mp - mp),
        "lm = 0": max_norm(lp @ mp),
        "ml = 0": max_norm(mp @ lp),
        "l + m = I": max_norm(lp + mp - eye),
        "Jl = rho l": max_norm(Jp @ lp - rho * lp),
        "lJ = rho l": max_norm(lp @ Jp - rho * lp),
        "Jm = (a-rho) m": max_norm(Jp @ mp - rho_bar * mp),
        "mJ = (a-rho) m": max_norm(mp @ Jp - rho_bar * mp),
    }


def metallic_from_projector(
    v: TensorField11, params: MetallicParams, points=None, tol: float = DEFAULT_TOL, check: bool = True
) -> TensorField11:
    """J = rho I - sqrt(a^2+4b) v for an idempotent v.

    ker v becomes the rho-eigendistribution and im v the (a - rho) one.
    """
    if check:
        require(
            "idempotent condition v^2 = v",
            lambda ev: max_norm(v.matrix(ev) @ v.matrix(ev) - v.matrix(ev)),
            _points(v, points),
            tol,
        )
    return TensorField11.identity(v.chart) * params.rho - v * params.disc


def projector_eigen_residual(J: TensorField11, v: TensorField11, params: MetallicParams, p) -> float:
    """Max of |J(I - v) - rho (I - v)| and |J v - (a - rho) v| at p."""
    ev = at(p)
    Jp, vp = J.matrix(ev), v.matrix(ev)
    h = np.eye(Jp.shape[0]) - vp
    return max(
        max_norm(Jp @ h - params.rho * h),
        max_norm(Jp @ vp - params.conjugate_root * vp),
    )

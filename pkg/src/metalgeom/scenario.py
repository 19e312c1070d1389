"""Declarative scenarios: load, sample, run the requested checks, report.

A scenario is a JSON object::

    {
      "name": "r2_example",
      "coords": ["x", "y"],               # "dim" is optional and must match
      "params": {"a": 1, "b": 1},
      "fields": {"J": [["...", "..."], ["...", "..."]], ...},
      "sampling": {"box": [[-2, 2], [-2, 2]], "count": 100, "seed": 42,
                   "exclude": "x^2 + y^2 < 0.01"},
      "tolerance": 1e-8,
      "tolerances": {"nijenhuis_integrability": 1e-7},
      "riemannian": false,
      "checks": ["metallic", "projector_identities"]
    }

Field entries are expression strings (or numbers) over the coordinates and
may use the constants ``a``, ``b``, ``rho`` and ``disc``. Matrix fields (J, F,
T, v, l, m, g) are row-major, so ``J[i][j]`` is the i-th component of the
image of the j-th frame. ``gamma`` and ``Q`` are indexed ``[k][i][j]``. ``C``
is a constant matrix whose entries may be complex, written as strings such as
``"0.5+1j"``.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Callable, Mapping

import numpy as np

from . import __version__
from .chart import (
    Chart,
    MetricField,
    TensorField11,
    TensorField12,
    VectorField,
    frames,
    lie_bracket,
    max_norm,
    nijenhuis,
    nijenhuis_scaling_check,
)
from .connect import (
    ConnectionCoeffs,
    additivity_residual,
    delta_J,
    distribution_parallel_residual,
    function_linearity_residual,
    leibniz_residual,
    levi_civita,
    metric_compatibility_residual,
    nabla_tensor,
    obata_connection,
    schouten,
    vranceanu,
)
from .errors import DomainError, ExprSyntaxError, PreconditionError, ScenarioError
from .expr import Predicate, parse_predicate
from .metallic import (
    MetallicParams,
    StructureKind,
    complex_metallic,
    from_product,
    metallic_from_projector,
    metallic_residual,
    polynomial_residual,
    projector_residuals,
    projectors,
)
from .randfields import random_polynomial, random_tensor12, random_vector_field
from .riemann import g_symmetry_residual, locally_product_check, nj_symmetry_residual, orthogonality_residual
from .verify import DEFAULT_TOL, CheckResult, sweep

MATRIX_FIELDS = ("J", "F", "T", "v", "l", "m", "g")
VECTOR_FIELDS = ("X", "Y")
TENSOR12_FIELDS = ("gamma", "Q")
FIELD_NAMES = MATRIX_FIELDS + VECTOR_FIELDS + TENSOR12_FIELDS + ("C",)

# any one of these field sets determines J
_J_SOURCES = (("J",), ("F",), ("v",), ("l", "m"))


@dataclass(frozen=True)
class CheckSpec:
    name: str
    description: str
    requires: tuple[tuple[str, ...], ...] = ((),)


CHECKS: dict[str, CheckSpec] = {
    c.name: c
    for c in [
        CheckSpec("metallic", "J^2 = aJ + bI", _J_SOURCES),
        CheckSpec("projector_identities", "l, m idempotent, complementary, and eigen-relations with J", _J_SOURCES),
        CheckSpec("nijenhuis_integrability", "N_J vanishes on frame pairs", _J_SOURCES),
        CheckSpec("nf_nj_scaling", "N_F = 4/(a^2+4b) N_J", _J_SOURCES),
        CheckSpec("schouten_parallel", "l, m, J and L, M parallel for the Schouten connection", _J_SOURCES),
        CheckSpec("vranceanu_parallel", "l, m, J and L, M parallel for the Vranceanu connection", _J_SOURCES),
        CheckSpec("half_parallel", "m(dJ)(lX,Y) = (a-2rho) m[lX,mY] and its mirror under Vranceanu", _J_SOURCES),
        CheckSpec("anti_half_parallel", "l(dJ)(lX,Y) = 0 and m(dJ)(mX,Y) = 0 under Vranceanu", _J_SOURCES),
        CheckSpec("obata_parallel", "nabla J = 0 for the Obata connection", _J_SOURCES),
        CheckSpec("g_symmetry", "g(JX,Y) = g(X,JY)", _J_SOURCES),
        CheckSpec("orthogonality", "g(lX, mY) = 0", _J_SOURCES),
        CheckSpec("nj_symmetry", "N_J(JX,Y) = N_J(X,JY)", _J_SOURCES),
        CheckSpec("locally_product", "F parallel for the Levi-Civita connection of g", _J_SOURCES),
        CheckSpec("connection_axioms", "additivity, Leibniz rule and function-linearity of every connection"),
        CheckSpec("levi_civita_compat", "Levi-Civita connection of g is metric and torsion-free"),
        CheckSpec("tangent_polynomial", "T^2 = 0 and J_t annihilated by x^2 - ax + a^2/4", (("T",),)),
        CheckSpec("complex_polynomial", "C^2 = -I and J_c annihilated by x^2 - ax + (a^2+2b)/2", (("C",),)),
        CheckSpec("positive_definite", "g positive definite (added when the scenario is riemannian)"),
    ]
}


@dataclass(frozen=True)
class Sampling:
    box: tuple[tuple[float, float], ...]
    count: int
    seed: int = 0
    exclude: str | None = None
    predicate: Predicate | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Scenario:
    name: str
    chart: Chart
    params: MetallicParams
    fields: Mapping[str, Any]
    sampling: Sampling
    checks: tuple[str, ...]
    tolerance: float = DEFAULT_TOL
    tolerances: Mapping[str, float] = field(default_factory=dict)

    def tol_for(self, check: str) -> float:
        return self.tolerances.get(check, self.tolerance)

    def with_overrides(
        self, tolerance: float | None = None, samples: int | None = None, seed: int | None = None
    ) -> Scenario:
        s = self.sampling
        if samples is not None:
            s = dataclasses.replace(s, count=samples)
        if seed is not None:
            s = dataclasses.replace(s, seed=seed)
        tol = self.tolerance if tolerance is None else tolerance
        tols = self.tolerances if tolerance is None else {}
        return dataclasses.replace(self, sampling=s, tolerance=tol, tolerances=tols)


# ---------------------------------------------------------------------------
# loading


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ScenarioError(f"{where} must be a finite number, got {value!r}")
    return float(value)


def _grid(value, shape: tuple[int, ...], where: str):
    if len(shape) == 0:
        if not isinstance(value, (str, int, float)) or isinstance(value, bool):
            raise ScenarioError(f"{where} must be an expression string or a number, got {value!r}")
        return value
    if not isinstance(value, list) or len(value) != shape[0]:
        raise ScenarioError(f"{where} must be a list of length {shape[0]}")
    return [_grid(v, shape[1:], f"{where}[{i}]") for i, v in enumerate(value)]


def _parse_grid(chart: Chart, grid, constants, where: str):
    if isinstance(grid, list):
        return tuple(_parse_grid(chart, g, constants, f"{where}[{i}]") for i, g in enumerate(grid))
    try:
        return chart.parse(grid, constants)
    except ExprSyntaxError as exc:
        raise ScenarioError(f"{where}: {exc}") from exc


def _parse_complex_matrix(value, n: int) -> np.ndarray:
    grid = _grid(value, (n, n), "fields.C")
    out = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            try:
                out[i, j] = complex(grid[i][j])
            except ValueError:
                raise ScenarioError(f"fields.C[{i}][{j}]: not a complex number: {grid[i][j]!r}") from None
    return out if np.any(out.imag) else out.real


def _parse_fields(chart: Chart, raw: Mapping, constants) -> dict[str, Any]:
    if not isinstance(raw, Mapping):
        raise ScenarioError("fields must be an object")
    unknown = sorted(set(raw) - set(FIELD_NAMES))
    if unknown:
        raise ScenarioError(f"unknown field(s) {unknown}; valid fields: {', '.join(FIELD_NAMES)}")
    n = chart.dim
    out: dict[str, Any] = {}
    for name, value in raw.items():
        where = f"fields.{name}"
        if name in MATRIX_FIELDS:
            entries = _parse_grid(chart, _grid(value, (n, n), where), constants, where)
            cls = MetricField if name == "g" else TensorField11
            out[name] = cls(chart, entries)
        elif name in VECTOR_FIELDS:
            out[name] = VectorField(chart, _parse_grid(chart, _grid(value, (n,), where), constants, where))
        elif name in TENSOR12_FIELDS:
            entries = _parse_grid(chart, _grid(value, (n, n, n), where), constants, where)
            out[name] = TensorField12(chart, entries)
        else:
            out[name] = _parse_complex_matrix(value, n)
    return out


def _parse_sampling(raw, chart: Chart, constants) -> Sampling:
    if not isinstance(raw, Mapping):
        raise ScenarioError("sampling must be an object with box, count and seed")
    n = chart.dim
    box = raw.get("box")
    if not isinstance(box, list) or len(box) != n:
        raise ScenarioError(f"sampling.box must list {n} intervals")
    intervals = []
    for i, iv in enumerate(box):
        if not isinstance(iv, list) or len(iv) != 2:
            raise ScenarioError(f"sampling.box[{i}] must be [low, high]")
        lo, hi = (_number(v, f"sampling.box[{i}]") for v in iv)
        if not lo < hi:
            raise ScenarioError(f"sampling.box[{i}] is empty: [{lo}, {hi}]")
        intervals.append((lo, hi))
    count = raw.get("count", 100)
    seed = raw.get("seed", 0)
    for key, v in (("count", count), ("seed", seed)):
        if isinstance(v, bool) or not isinstance(v, int):
            raise ScenarioError(f"sampling.{key} must be an integer, got {v!r}")
    exclude = raw.get("exclude")
    predicate = None
    if exclude is not None:
        if not isinstance(exclude, str):
            raise ScenarioError("sampling.exclude must be an expression string")
        try:
            predicate = parse_predicate(exclude, chart.coords, constants)
        except ExprSyntaxError as exc:
            raise ScenarioError(f"sampling.exclude: {exc}") from exc
    return Sampling(tuple(intervals), count, seed, exclude, predicate)


def _check_requirements(checks, fields: Mapping) -> None:
    have = set(fields)
    for name in checks:
        options = CHECKS[name].requires
        if not any(set(opt) <= have for opt in options):
            alts = " or ".join("(" + ", ".join(o) + ")" if len(o) > 1 else o[0] for o in options)
            raise ScenarioError(f"check {name!r} needs field {alts}")


def scenario_from_dict(data: Mapping, allow_real: bool = False) -> Scenario:
    """Validate a decoded scenario object and parse every expression."""
    if not isinstance(data, Mapping):
        raise ScenarioError("scenario must be a JSON object")
    known = {"name", "dim", "coords", "params", "fields", "sampling", "tolerance", "tolerances", "checks", "riemannian"}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ScenarioError(f"unknown scenario key(s) {unknown}")
    for key in ("coords", "params", "sampling", "checks"):
        if key not in data:
            raise ScenarioError(f"missing required key {key!r}")

    coords = data["coords"]
    if not isinstance(coords, list) or not all(isinstance(c, str) for c in coords):
        raise ScenarioError("coords must be a list of names")
    try:
        chart = Chart(tuple(coords))
    except ValueError as exc:
        raise ScenarioError(f"coords: {exc}") from exc
    if "dim" in data and data["dim"] != chart.dim:
        raise ScenarioError(f"dim {data['dim']!r} does not match {chart.dim} coordinates")

    p = data["params"]
    if not isinstance(p, Mapping) or "a" not in p or "b" not in p:
        raise ScenarioError("params must be an object with a and b")
    try:
        params = MetallicParams(p["a"], p["b"], allow_real=allow_real)
    except ValueError as exc:
        raise ScenarioError(f"params: {exc}") from exc
    constants = params.constants()

    checks = data["checks"]
    if not isinstance(checks, list) or not all(isinstance(c, str) for c in checks):
        raise ScenarioError("checks must be a list of check names")
    bad = [c for c in checks if c not in CHECKS]
    if bad:
        raise ScenarioError(f"unknown check(s) {bad}; valid checks: {', '.join(CHECKS)}")
    if data.get("riemannian") and "positive_definite" not in checks:
        checks = checks + ["positive_definite"]

    fields = _parse_fields(chart, data.get("fields", {}), constants)
    _check_requirements(checks, fields)

    tol = _number(data.get("tolerance", DEFAULT_TOL), "tolerance")
    tols = data.get("tolerances", {})
    if not isinstance(tols, Mapping):
        raise ScenarioError("tolerances must map check names to numbers")
    for k, v in tols.items():
        if k not in CHECKS:
            raise ScenarioError(f"tolerances: unknown check {k!r}")
        _number(v, f"tolerances.{k}")
    name = data.get("name", "scenario")
    if not isinstance(name, str):
        raise ScenarioError("name must be a string")
    return Scenario(
        name=name,
        chart=chart,
        params=params,
        fields=fields,
        sampling=_parse_sampling(data["sampling"], chart, constants),
        checks=tuple(checks),
        tolerance=tol,
        tolerances={k: float(v) for k, v in tols.items()},
    )


def load_scenario(source, allow_real: bool = False) -> Scenario:
    """Load a scenario from a JSON file path or an already-decoded object."""
    if isinstance(source, Mapping):
        return scenario_from_dict(source, allow_real)
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {str(path)!r}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return scenario_from_dict(data, allow_real)


# ---------------------------------------------------------------------------
# sampling


def sample_points(sampling: Sampling, dim: int) -> list[list[float]]:
    """Seeded uniform points in the box, resampling excluded ones.

    A point where the exclusion predicate cannot be evaluated counts as
    excluded. At most ``count * 100`` candidates are drawn.
    """
    if sampling.count < 1:
        raise ScenarioError(f"sampling.count must be at least 1, got {sampling.count}")
    if len(sampling.box) != dim:
        raise ScenarioError(f"sampling.box has {len(sampling.box)} intervals for dimension {dim}")
    lo = np.array([iv[0] for iv in sampling.box])
    hi = np.array([iv[1] for iv in sampling.box])
    rng = np.random.default_rng(sampling.seed)
    cap = sampling.count * 100
    out: list[list[float]] = []
    for _ in range(cap):
        p = [float(v) for v in lo + (hi - lo) * rng.random(dim)]
        if sampling.predicate is not None:
            try:
                excluded = sampling.predicate.holds(p)
            except DomainError:
                excluded = True
            if excluded:
                continue
        out.append(p)
        if len(out) == sampling.count:
            return out
    raise ScenarioError(
        f"exclusion region too large: only {len(out)} of {sampling.count} points found in {cap} draws"
    )


# ---------------------------------------------------------------------------
# checks


class _Context:
    """Fields of a scenario plus everything derived from them, built on demand."""

    def __init__(self, sc: Scenario):
        self.sc = sc
        self.chart = sc.chart
        self.params = sc.params
        self.f = sc.fields
        self.frames = frames(sc.chart)

    def rng(self, k: int) -> np.random.Generator:
        return np.random.default_rng([self.sc.sampling.seed, k])

    @cached_property
    def J(self) -> TensorField11:
        f, p = self.f, self.params
        if "J" in f:
            return f["J"]
        if "F" in f:
            return from_product(f["F"], p, check=False)
        if "v" in f:
            return metallic_from_projector(f["v"], p, check=False)
        l, m = f["l"], f["m"]
        return l * p.rho + m * p.conjugate_root

    @cached_property
    def lm(self) -> tuple[TensorField11, TensorField11]:
        if "l" in self.f and "m" in self.f:
            return self.f["l"], self.f["m"]
        return projectors(self.J, self.params, check=False)

    @cached_property
    def g(self) -> MetricField:
        g = self.f.get("g")
        return g if g is not None else MetricField.identity(self.chart)

    @cached_property
    def base(self) -> ConnectionCoeffs:
        if "gamma" in self.f:
            return ConnectionCoeffs(self.chart, self.f["gamma"].array, tag="user")
        return ConnectionCoeffs.flat(self.chart)

    @cached_property
    def schouten(self):
        return schouten(self.base, *self.lm, check=False)

    @cached_property
    def vranceanu(self):
        return vranceanu(self.base, *self.lm, check=False)

    def ordered_pairs(self) -> list[tuple[VectorField, VectorField]]:
        fr = self.frames
        pairs = [(x, y) for x in fr for y in fr]
        return pairs + self._user_pairs()

    def distinct_pairs(self) -> list[tuple[VectorField, VectorField]]:
        fr = self.frames
        pairs = [(fr[i], fr[j]) for i in range(len(fr)) for j in range(i + 1, len(fr))]
        return pairs + self._user_pairs()

    def _user_pairs(self):
        X, Y = self.f.get("X"), self.f.get("Y")
        if X is not None and Y is not None:
            return [(X, Y), (Y, X)]
        extra = X if X is not None else Y
        return [(extra, y) for y in self.frames] if extra is not None else []


def _max(values) -> float:
    return max(values, default=0.0)


def _metallic(ctx: _Context, ev) -> float:
    return metallic_residual(ctx.J.matrix(ev), ctx.params.a, ctx.params.b)


def _projector_identities(ctx: _Context, ev) -> float:
    return _max(projector_residuals(ctx.J, *ctx.lm, ctx.params, ev).values())


def _nijenhuis(ctx: _Context, ev) -> float:
    return _max(max_norm(nijenhuis(ctx.J, X, Y, ev)) for X, Y in ctx.distinct_pairs())


def _nf_nj_scaling(ctx: _Context, ev) -> float:
    p = ctx.params
    return _max(nijenhuis_scaling_check(ctx.J, p.a, p.b, X, Y, ev) for X, Y in ctx.distinct_pairs())


def _parallel(conn_attr: str):
    def residual(ctx: _Context, ev) -> float:
        conn = getattr(ctx, conn_attr)
        l, m = ctx.lm
        worst = 0.0
        for X, Y in ctx.ordered_pairs():
            for A in (l, m, ctx.J):
                worst = max(worst, max_norm(nabla_tensor(conn, A, X, Y, ev)))
            worst = max(worst, distribution_parallel_residual(conn, l, m, X, Y, ev))
        return worst

    return residual


def _half_parallel(ctx: _Context, ev) -> float:
    l, m = ctx.lm
    J, conn = ctx.J, ctx.vranceanu
    k = ctx.params.a - 2.0 * ctx.params.rho
    lp, mp = l.matrix(ev), m.matrix(ev)
    worst = 0.0
    for X, Y in ctx.ordered_pairs():
        lX, mX, lY, mY = l.apply(X), m.apply(X), l.apply(Y), m.apply(Y)
        r1 = mp @ delta_J(conn, J, lX, Y, ev) - k * (mp @ lie_bracket(lX, mY, ev))
        r2 = lp @ delta_J(conn, J, mX, Y, ev) + k * (lp @ lie_bracket(mX, lY, ev))
        worst = max(worst, max_norm(r1), max_norm(r2))
    return worst


def _anti_half_parallel(ctx: _Context, ev) -> float:
    l, m = ctx.lm
    J, conn = ctx.J, ctx.vranceanu
    lp, mp = l.matrix(ev), m.matrix(ev)
    worst = 0.0
    for X, Y in ctx.ordered_pairs():
        worst = max(
            worst,
            max_norm(lp @ delta_J(conn, J, l.apply(X), Y, ev)),
            max_norm(mp @ delta_J(conn, J, m.apply(X), Y, ev)),
        )
    return worst


def _obata_connections(ctx: _Context):
    if "Q" in ctx.f:
        qs = [ctx.f["Q"]]
    else:
        qs = [None, random_tensor12(ctx.chart, ctx.rng(2))]
    return [obata_connection(ctx.base, ctx.J, ctx.params, Q, check=False) for Q in qs]


def _g_symmetry(ctx: _Context, ev) -> float:
    return g_symmetry_residual(ctx.g, ctx.J, ev)


def _orthogonality(ctx: _Context, ev) -> float:
    return orthogonality_residual(ctx.g, *ctx.lm, ev)


def _nj_symmetry(ctx: _Context, ev) -> float:
    return _max(nj_symmetry_residual(ctx.J, X, Y, ev) for X, Y in ctx.distinct_pairs())


def _positive_definite(ctx: _Context, ev) -> float:
    # 0 when definite; otherwise at least 1 so the check fails at any sane tolerance
    lam = float(np.linalg.eigvalsh(ctx.g.matrix(ev)).min())
    return 0.0 if lam > 0 else 1.0 - lam


def _levi_civita_compat(ctx: _Context):
    lc = levi_civita(ctx.g)

    def residual(ev) -> float:
        return max(
            metric_compatibility_residual(ctx.g, lc, ev),
            lc.torsion_residual(ev),
            ctx.g.symmetry_residual(ev),
        )

    return residual


def _connection_axioms(ctx: _Context):
    conns = [ctx.base]
    if any(set(opt) <= set(ctx.f) for opt in _J_SOURCES):
        conns += [ctx.schouten, ctx.vranceanu, *_obata_connections(ctx)]
    rng = ctx.rng(1)
    f = random_polynomial(ctx.chart, rng)
    X = random_vector_field(ctx.chart, rng)
    Y = random_vector_field(ctx.chart, rng)
    e0, e1 = ctx.frames[0], ctx.frames[-1]

    def residual(ev) -> float:
        return _max(
            max(
                leibniz_residual(c, X, Y, f, ev),
                function_linearity_residual(c, X, Y, f, ev),
                additivity_residual(c, X, e0, Y, e1, ev),
            )
            for c in conns
        )

    return residual


def _per_point(fn: Callable[[_Context, Any], float]):
    return lambda ctx: (lambda ev: fn(ctx, ev))


def _obata_parallel(ctx: _Context):
    conns = _obata_connections(ctx)
    pairs = ctx.ordered_pairs()

    def residual(ev) -> float:
        return _max(max_norm(nabla_tensor(c, ctx.J, X, Y, ev)) for c in conns for X, Y in pairs)

    return residual


def _tangent_polynomial(ctx: _Context):
    T = ctx.f["T"]
    Jt = TensorField11.identity(ctx.chart) * (ctx.params.a / 2.0) + T * (ctx.params.disc / 2.0)

    def residual(ev) -> float:
        Tp = T.matrix(ev)
        return max(
            max_norm(Tp @ Tp),
            polynomial_residual(Jt.matrix(ev), ctx.params, StructureKind.TANGENT_METALLIC),
        )

    return residual


# builders take the context and return a per-point residual
_RESIDUALS: dict[str, Callable[[_Context], Callable]] = {
    "metallic": _per_point(_metallic),
    "projector_identities": _per_point(_projector_identities),
    "nijenhuis_integrability": _per_point(_nijenhuis),
    "nf_nj_scaling": _per_point(_nf_nj_scaling),
    "schouten_parallel": _per_point(_parallel("schouten")),
    "vranceanu_parallel": _per_point(_parallel("vranceanu")),
    "half_parallel": _per_point(_half_parallel),
    "anti_half_parallel": _per_point(_anti_half_parallel),
    "obata_parallel": _obata_parallel,
    "g_symmetry": _per_point(_g_symmetry),
    "orthogonality": _per_point(_orthogonality),
    "nj_symmetry": _per_point(_nj_symmetry),
    "connection_axioms": _connection_axioms,
    "levi_civita_compat": _levi_civita_compat,
    "tangent_polynomial": _tangent_polynomial,
    "positive_definite": _per_point(_positive_definite),
}


def _complex_polynomial(ctx: _Context, tol: float) -> CheckResult:
    try:
        Jc = complex_metallic(ctx.f["C"], ctx.params, tol=tol)
    except PreconditionError as exc:
        return CheckResult("complex_polynomial", False, exc.residual, None, 1, str(exc))
    r = polynomial_residual(Jc, ctx.params, StructureKind.COMPLEX_METALLIC)
    return CheckResult("complex_polynomial", r <= tol, r, None, 1, "constant field; evaluated once")


def run_check(name: str, ctx: _Context, points, tol: float) -> CheckResult:
    if name == "complex_polynomial":
        return _complex_polynomial(ctx, tol)
    if name == "locally_product":
        return locally_product_check(ctx.g, ctx.J, ctx.params, points, tol)
    return sweep(name, _RESIDUALS[name](ctx), points, tol)


# ---------------------------------------------------------------------------
# reports


@dataclass
class Report:
    scenario: str
    checks: list[CheckResult]
    seed: int
    samples: int
    params: tuple[float, float]
    tolerances: dict[str, float]
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_dict(self) -> dict:
        records = []
        for c in self.checks:
            d = c.to_dict()
            d["tolerance"] = self.tolerances[c.name]
            records.append(d)
        return {
            "scenario": self.scenario,
            "version": self.version,
            "seed": self.seed,
            "samples": self.samples,
            "params": {"a": self.params[0], "b": self.params[1]},
            "pass": self.passed,
            "checks": records,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    def to_text(self) -> str:
        a, b = self.params
        lines = [f"scenario {self.scenario}  a={a:g} b={b:g}  seed={self.seed}  samples={self.samples}"]
        width = max((len(c.name) for c in self.checks), default=0)
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            line = f"  {status}  {c.name:<{width}}  max_residual={c.max_residual:.3e}  tol={self.tolerances[c.name]:.1e}"
            if not c.passed and c.worst_point is not None:
                line += "  at (" + ", ".join(f"{v:.6g}" for v in c.worst_point) + ")"
            if c.note:
                line += f"  [{c.note}]"
            lines.append(line)
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"


def _encode(obj, indent: int) -> str:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return format(x, ".17g") if math.isfinite(x) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_encode(obj[k], indent + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, 0) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + _encode(v, indent + 1) for v in obj) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj) -> str:
    """Sorted keys, floats with 17 significant digits, two-space indent, trailing newline."""
    return _encode(obj, 0) + "\n"


def run(scenario: Scenario) -> Report:
    """Sample the points and run every requested check; a failing check never stops the others."""
    points = sample_points(scenario.sampling, scenario.chart.dim)
    ctx = _Context(scenario)
    results = [run_check(name, ctx, points, scenario.tol_for(name)) for name in scenario.checks]
    return Report(
        scenario=scenario.name,
        checks=results,
        seed=scenario.sampling.seed,
        samples=len(points),
        params=(scenario.params.a, scenario.params.b),
        tolerances={name: scenario.tol_for(name) for name in scenario.checks},
    )

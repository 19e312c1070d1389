"""Sample-point verification: residual sweeps and their results."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError, PreconditionError
from .expr import PointEval

DEFAULT_TOL = 1e-8


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_residual: float
    worst_point: list[float] | None
    points_evaluated: int
    note: str = ""
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        residual = self.max_residual if math.isfinite(self.max_residual) else None
        d = {
            "name": self.name,
            "pass": self.passed,
            "max_residual": residual,
            "worst_point": self.worst_point,
            "points_evaluated": self.points_evaluated,
        }
        if self.note:
            d["note"] = self.note
        if self.details:
            d["details"] = {k: (v if math.isfinite(v) else None) for k, v in self.details.items()}
        return d


def sweep(
    name: str,
    residual: Callable[[PointEval], float],
    points: Iterable[Sequence[float]],
    tol: float = DEFAULT_TOL,
) -> CheckResult:
    """Evaluate ``residual`` at every point and keep the worst one.

    A domain error ends the sweep with a failure recorded at that point.
    """
    worst, worst_point, count = 0.0, None, 0
    for p in points:
        ev = PointEval(p)
        try:
            r = float(residual(ev))
        except DomainError as exc:
            return CheckResult(
                name, False, math.inf, [float(v) for v in p], count, f"domain error: {exc}"
            )
        count += 1
        if not math.isfinite(r):
            return CheckResult(name, False, math.inf, [float(v) for v in p], count, "non-finite residual")
        if worst_point is None or r > worst:
            worst, worst_point = r, [float(v) for v in p]
    if count == 0:
        return CheckResult(name, False, math.inf, None, 0, "no sample points")
    return CheckResult(name, worst <= tol, worst, worst_point, count)


def probe_points(dim: int, count: int = 12, seed: int = 0, half_width: float = 1.5) -> list[np.ndarray]:
    """Fixed pseudo-random points used when a caller supplies none."""
    rng = np.random.default_rng(seed)
    return list(rng.uniform(-half_width, half_width, size=(count, dim)))


def require(
    what: str,
    residual: Callable[[PointEval], float],
    points: Iterable[Sequence[float]],
    tol: float,
) -> None:
    """Raise :class:`PreconditionError` if ``residual`` exceeds ``tol`` somewhere.

    Points where evaluation leaves the domain are skipped; they say nothing
    about the algebraic identity being checked.
    """
    worst, worst_point, seen = 0.0, None, 0
    for p in points:
        try:
            r = float(residual(PointEval(p)))
        except DomainError:
            continue
        seen += 1
        if worst_point is None or not r <= worst:  # also catches NaN
            worst, worst_point = r, p
    if seen == 0:
        raise PreconditionError(f"{what}: no evaluable sample point")
    if not worst <= tol:
        raise PreconditionError(f"{what} fails", worst_point, worst)

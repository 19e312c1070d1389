"""Exception types shared across the package."""

from __future__ import annotations


def _fmt(point) -> str:
    return "[" + ", ".join(f"{float(v):.6g}" for v in point) + "]"


class MetalgeomError(Exception):
    """Base class for all errors raised by metalgeom."""


class ExprSyntaxError(MetalgeomError, ValueError):
    """Malformed field expression. ``offset`` is the 0-based character index."""

    def __init__(self, message: str, source: str, offset: int):
        self.source = source
        self.offset = offset
        super().__init__(f"{message} at offset {offset} in {source!r}")


class UnknownIdentifierError(ExprSyntaxError):
    """Identifier that is neither a coordinate, a constant nor a function."""


class DomainError(MetalgeomError, ArithmeticError):
    """Evaluation left the domain of an operation (x/0, sqrt(-1), ln(0), ...)."""

    def __init__(self, message: str, subexpr: str = "", point=None):
        self.subexpr = subexpr
        self.point = point
        text = message
        if subexpr:
            text += f" in '{subexpr}'"
        if point is not None:
            text += f" at {_fmt(point)}"
        super().__init__(text)


class PreconditionError(MetalgeomError, ValueError):
    """Input field fails a structural precondition at some sample point."""

    def __init__(self, message: str, worst_point=None, residual: float | None = None):
        self.worst_point = worst_point
        self.residual = residual
        text = message
        if residual is not None:
            text += f" (residual {residual:.3e}"
            text += f" at {_fmt(worst_point)})" if worst_point is not None else ")"
        super().__init__(text)


class ScenarioError(MetalgeomError, ValueError):
    """Invalid scenario file or request."""

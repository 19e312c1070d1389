"""Built-in scenarios, returned as plain JSON-compatible objects."""

from __future__ import annotations

from importlib import resources
from typing import Callable

import numpy as np

from .families import (
    Family2DSpec,
    canonical_pair,
    clifford_metallic,
    family_2d,
    metallic_reflection,
    triple_structure,
)
from .metallic import MetallicParams

_R2_J = [
    ["(rho*x^2 + (a-rho)*y^2)/(x^2+y^2)", "(2*rho-a)*x*y/(x^2+y^2)"],
    ["(2*rho-a)*x*y/(x^2+y^2)", "((a-rho)*x^2 + rho*y^2)/(x^2+y^2)"],
]
_R2_L = [["x^2/(x^2+y^2)", "x*y/(x^2+y^2)"], ["x*y/(x^2+y^2)", "y^2/(x^2+y^2)"]]
_R2_M = [["y^2/(x^2+y^2)", "-x*y/(x^2+y^2)"], ["-x*y/(x^2+y^2)", "x^2/(x^2+y^2)"]]
_R2_SAMPLING = {"box": [[-2, 2], [-2, 2]], "count": 100, "seed": 42, "exclude": "x^2+y^2 < 0.01"}
_CONSTANT_SAMPLING = {"count": 10, "seed": 7}


def _rows(M: np.ndarray) -> list[list[float]]:
    return [[float(v) for v in row] for row in np.asarray(M)]


def _box(n: int, half: float = 1.0) -> list[list[float]]:
    return [[-half, half] for _ in range(n)]


def r2_example(a: int = 1, b: int = 1) -> dict:
    """The rotationally symmetric structure on the punctured plane."""
    return {
        "name": "r2_example",
        "coords": ["x", "y"],
        "params": {"a": a, "b": b},
        "fields": {"J": _R2_J, "l": _R2_L, "m": _R2_M},
        "sampling": dict(_R2_SAMPLING),
        "tolerance": 1e-8,
        "checks": [
            "metallic",
            "projector_identities",
            "nijenhuis_integrability",
            "nf_nj_scaling",
            "schouten_parallel",
            "vranceanu_parallel",
            "half_parallel",
            "anti_half_parallel",
            "g_symmetry",
            "orthogonality",
            "nj_symmetry",
        ],
    }


def family2d(a: int = 2, b: int = 1) -> dict:
    J = family_2d(Family2DSpec(MetallicParams(a, b), r=0.0, s=1.0))
    return {
        "name": "family2d",
        "coords": ["x", "y"],
        "params": {"a": a, "b": b},
        "fields": {"J": _rows(J)},
        "sampling": {**_CONSTANT_SAMPLING, "box": _box(2)},
        "checks": ["metallic", "projector_identities", "nijenhuis_integrability", "schouten_parallel"],
    }


def clifford(a: int = 1, b: int = 1) -> dict:
    J = clifford_metallic(2, MetallicParams(a, b))
    return {
        "name": "clifford",
        "coords": ["x", "y"],
        "params": {"a": a, "b": b},
        "fields": {"J": _rows(J)},
        "sampling": {**_CONSTANT_SAMPLING, "box": _box(2)},
        "riemannian": True,
        "checks": [
            "metallic",
            "projector_identities",
            "nijenhuis_integrability",
            "g_symmetry",
            "orthogonality",
            "locally_product",
        ],
    }


def reflection(a: int = 1, b: int = 1) -> dict:
    J = metallic_reflection([1.0, 2.0, 2.0], MetallicParams(a, b))
    return {
        "name": "reflection",
        "coords": ["x", "y", "z"],
        "params": {"a": a, "b": b},
        "fields": {"J": _rows(J)},
        "sampling": {**_CONSTANT_SAMPLING, "box": _box(3)},
        "checks": ["metallic", "projector_identities", "g_symmetry", "orthogonality", "locally_product"],
    }


def triple(a: int = 1, b: int = 1) -> dict:
    """Almost biproduct complex pair: J_F metallic, and the complex factor K = TF."""
    F, T = canonical_pair("abpc")
    res = triple_structure(F, T, "abpc", MetallicParams(a, b))
    K = T @ F
    return {
        "name": "triple",
        "coords": ["x", "y"],
        "params": {"a": a, "b": b},
        "fields": {"J": _rows(res.J_F), "C": _rows(K)},
        "sampling": {**_CONSTANT_SAMPLING, "box": _box(2)},
        "checks": ["metallic", "projector_identities", "complex_polynomial"],
    }


def obata(a: int = 1, b: int = 1) -> dict:
    return {
        "name": "obata",
        "coords": ["x", "y"],
        "params": {"a": a, "b": b},
        "fields": {
            "J": _R2_J,
            "Q": [[["x", "y^2"], ["1", "x*y"]], [["0", "x-y"], ["y", "2"]]],
        },
        "sampling": {**_R2_SAMPLING, "count": 50},
        "checks": ["obata_parallel", "connection_axioms"],
    }


def nonintegrable3d(a: int = 1, b: int = 1) -> dict:
    """F = +1 on span{d_x, d_y + x d_z}, -1 on span{d_z}; N_F(d_x, d_y) = 4 d_z."""
    return {
        "name": "nonintegrable3d",
        "coords": ["x", "y", "z"],
        "params": {"a": a, "b": b},
        "fields": {"F": [["1", "0", "0"], ["0", "1", "0"], ["0", "2*x", "-1"]]},
        "sampling": {"box": _box(3), "count": 20, "seed": 3},
        "checks": ["metallic", "nf_nj_scaling", "nijenhuis_integrability"],
    }


BUILTINS: dict[str, Callable[..., dict]] = {
    "r2_example": r2_example,
    "family2d": family2d,
    "clifford": clifford,
    "reflection": reflection,
    "triple": triple,
    "obata": obata,
    "nonintegrable3d": nonintegrable3d,
}


def builtin(name: str, a: int | None = None, b: int | None = None) -> dict:
    """Scenario object for a built-in demo, optionally with other parameters."""
    try:
        make = BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown demo {name!r}; available: {', '.join(BUILTINS)}") from None
    kw = {k: v for k, v in (("a", a), ("b", b)) if v is not None}
    return make(**kw)


def expected_report(name: str) -> str:
    """Pinned canonical report shipped with the package for a built-in demo."""
    if name not in BUILTINS:
        raise KeyError(f"unknown demo {name!r}")
    return resources.files("metalgeom").joinpath("data", "expected", f"{name}.json").read_text(encoding="utf-8")

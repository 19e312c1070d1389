"""Concrete metallic matrices: 2x2 families, Clifford and quaternion
representations, metallic reflections and triple structures.

Everything here works on constant numpy matrices.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .chart import max_norm
from .errors import PreconditionError
from .metallic import MetallicParams, StructureKind, polynomial_residual

ALGEBRA_TOL = 1e-10


class Variant(str, enum.Enum):
    GENERIC_RS = "generic-r-s"
    GENERIC_ST = "generic-s-t"
    TRIANGULAR_LOWER = "triangular-lower"
    TRIANGULAR_UPPER = "triangular-upper"
    DIAGONAL = "diagonal"


def _is_root(r: float, params: MetallicParams) -> bool:
    return any(np.isclose(r, root, rtol=1e-12, atol=1e-12) for root in (params.rho, params.conjugate_root))


@dataclass(frozen=True)
class Family2DSpec:
    """Parameters of one member of the 2x2 family.

    ``r`` is the top-left entry for the r-s variants; the generic-s-t variant
    uses ``t`` for the bottom-right entry instead.
    """

    params: MetallicParams
    r: float = 0.0
    s: float = 1.0
    variant: Variant | str = Variant.GENERIC_RS
    t: float = 0.0

    def __post_init__(self):
        variant = Variant(self.variant)
        object.__setattr__(self, "variant", variant)
        if variant in (Variant.GENERIC_RS, Variant.GENERIC_ST) and self.s == 0:
            raise ValueError(
                "s = 0 is not allowed in the generic variants; use the "
                "'triangular-lower', 'triangular-upper' or 'diagonal' variant with r in {rho, a - rho}"
            )
        if variant in (Variant.TRIANGULAR_LOWER, Variant.TRIANGULAR_UPPER, Variant.DIAGONAL):
            if not _is_root(self.r, self.params):
                raise ValueError(f"variant {variant.value!r} requires r = rho or r = a - rho, got r = {self.r!r}")
        if variant is Variant.DIAGONAL and self.s != 0:
            raise ValueError("the diagonal variant requires s = 0")


def family_2d(spec: Family2DSpec) -> np.ndarray:
    a, b = spec.params.a, spec.params.b
    r, s, t = spec.r, spec.s, spec.t
    v = spec.variant
    if v is Variant.GENERIC_RS:
        return np.array([[r, -(r * r - a * r - b) / s], [s, a - r]])
    if v is Variant.GENERIC_ST:
        return np.array([[a - t, -(t * t - a * t - b) / s], [s, t]])
    if v is Variant.TRIANGULAR_LOWER:
        return np.array([[r, 0.0], [s, a - r]])
    if v is Variant.TRIANGULAR_UPPER:
        return np.array([[r, s], [0.0, a - r]])
    return np.array([[r, 0.0], [0.0, a - r]])


# ---------------------------------------------------------------------------
# Clifford representation


def clifford_generators() -> tuple[np.ndarray, np.ndarray]:
    """e1, e2 of the 2-generator real Clifford algebra as 2x2 matrices."""
    return np.array([[1.0, 0.0], [0.0, -1.0]]), np.array([[0.0, 1.0], [1.0, 0.0]])


def clifford_metallic(i: int, params: MetallicParams, n: int = 2) -> np.ndarray:
    """J_i = (a I + sqrt(a^2+4b) e_i) / 2."""
    if n != 2:
        raise ValueError("only the 2-generator representation is supported")
    if i not in (1, 2):
        raise IndexError(f"generator index must be 1 or 2, got {i}")
    e = clifford_generators()[i - 1]
    return 0.5 * (params.a * np.eye(2) + params.disc * e)


def clifford_anticommutation_residual(Ji: np.ndarray, Jj: np.ndarray, params: MetallicParams) -> float:
    """Max-norm of JiJj + JjJi - a(Ji + Jj) + (a^2/2) I."""
    a = params.a
    eye = np.eye(Ji.shape[0])
    return max_norm(Ji @ Jj + Jj @ Ji - a * (Ji + Jj) + 0.5 * a * a * eye)


# ---------------------------------------------------------------------------
# reflections


def reflection(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return np.eye(v.size) - 2.0 * np.outer(v, v) / (v @ v)


def metallic_reflection(v, params: MetallicParams) -> np.ndarray:
    """J_v x = rho x - sqrt(a^2+4b) <x,v>/<v,v> v, i.e. (a I + sqrt(a^2+4b) r_v)/2."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or not np.any(v):
        raise ValueError("the normal vector must be a nonzero 1-D vector")
    return params.rho * np.eye(v.size) - params.disc * np.outer(v, v) / (v @ v)


# ---------------------------------------------------------------------------
# quaternions


def quaternion_product(p, q) -> np.ndarray:
    """Hamilton product of quaternions given as (w, x, y, z)."""
    w1, x1, y1, z1 = p
    w2, x2, y2, z2 = q
    return np.array(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ]
    )


def quaternion_matrix(q, side: str = "right") -> np.ndarray:
    """4x4 real matrix of x -> x q (side='right') or x -> q x (side='left')."""
    basis = np.eye(4)
    if side == "right":
        cols = [quaternion_product(e, q) for e in basis]
    elif side == "left":
        cols = [quaternion_product(q, e) for e in basis]
    else:
        raise ValueError("side must be 'left' or 'right'")
    return np.column_stack(cols)


def quaternion_units(side: str = "right") -> dict[str, np.ndarray]:
    return {name: quaternion_matrix(q, side) for name, q in zip("1ijk", np.eye(4))}


def split_quaternion_units() -> dict[str, np.ndarray]:
    """2x2 real matrices with i^2 = -1, j^2 = k^2 = 1 and ij = k."""
    i = np.array([[0.0, -1.0], [1.0, 0.0]])
    j = np.array([[1.0, 0.0], [0.0, -1.0]])
    return {"1": np.eye(2), "i": i, "j": j, "k": i @ j}


class ElementKind(str, enum.Enum):
    CLIFFORD_GENERATOR = "clifford-generator"
    UNIT_QUATERNION_VECTOR = "unit-quaternion-vector"
    SPLIT_QUATERNION_VECTOR = "split-quaternion-vector"


_SQUARE = {
    ElementKind.CLIFFORD_GENERATOR: 1.0,
    ElementKind.UNIT_QUATERNION_VECTOR: -1.0,
    ElementKind.SPLIT_QUATERNION_VECTOR: 1.0,
}


@dataclass(frozen=True)
class AlgebraElement:
    matrix: np.ndarray
    kind: ElementKind | str

    def __post_init__(self):
        kind = ElementKind(self.kind)
        m = np.asarray(self.matrix)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("algebra elements are square matrices")
        sign = _SQUARE[kind]
        r = max_norm(m @ m - sign * np.eye(m.shape[0]))
        if r > ALGEBRA_TOL:
            raise PreconditionError(f"{kind.value} must square to {'+' if sign > 0 else '-'}I", None, r)


def unit_vector_part(q) -> AlgebraElement:
    """Normalized vector part of a quaternion, as a 4x4 matrix squaring to -I."""
    q = np.asarray(q, dtype=float)
    vec = np.concatenate([[0.0], q[1:]])
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise ValueError("quaternion has no vector part")
    return AlgebraElement(quaternion_matrix(vec / norm), ElementKind.UNIT_QUATERNION_VECTOR)


def split_unit_vector_part(q) -> AlgebraElement:
    """Normalized spacelike vector part of a split quaternion (squares to +I)."""
    u = split_quaternion_units()
    _, x, y, z = np.asarray(q, dtype=float)
    square = -x * x + y * y + z * z
    if square <= 0:
        raise ValueError("vector part is not spacelike (its square must be positive)")
    S = (x * u["i"] + y * u["j"] + z * u["k"]) / np.sqrt(square)
    return AlgebraElement(S, ElementKind.SPLIT_QUATERNION_VECTOR)


def quaternion_metallic(S0: AlgebraElement, flavor: str, params: MetallicParams) -> np.ndarray:
    """Metallic element a/2 + (sqrt(a^2+4b)/2) S0, with an extra factor i for biquaternions.

    For 'biquaternion' S0 must square to -I; the imaginary unit turns it into
    an element squaring to +I, so the result has complex entries.
    """
    S = np.asarray(S0.matrix)
    eye = np.eye(S.shape[0])
    square = S @ S
    if flavor == "biquaternion":
        if max_norm(square + eye) > ALGEBRA_TOL:
            raise PreconditionError("biquaternion flavor needs S0^2 = -I", None, max_norm(square + eye))
        return 0.5 * params.a * eye + 0.5j * params.disc * S
    if flavor == "split":
        if max_norm(square - eye) > ALGEBRA_TOL:
            raise PreconditionError("split flavor needs S0^2 = +I", None, max_norm(square - eye))
        return 0.5 * params.a * eye + 0.5 * params.disc * S
    raise ValueError(f"unknown flavor {flavor!r}; expected 'split' or 'biquaternion'")


# ---------------------------------------------------------------------------
# triple structures


class TripleKind(str, enum.Enum):
    AHP = "ahp"  # almost hyperproduct
    ABPC = "abpc"  # almost biproduct complex
    APBC = "apbc"  # almost product bicomplex
    AHC = "ahc"  # almost hypercomplex

    @property
    def square(self) -> float:
        return 1.0 if self in (TripleKind.AHP, TripleKind.ABPC) else -1.0

    @property
    def commuting(self) -> bool:
        return self in (TripleKind.AHP, TripleKind.APBC)


@dataclass
class TripleResult:
    kind: TripleKind
    J_F: np.ndarray
    J_T: np.ndarray
    J_K: np.ndarray
    relation_residual: float
    pair_residual: float
    factor_kind: StructureKind
    J_K_kind: StructureKind
    J_K_residual: float


def _structure_matrix(M: np.ndarray, params: MetallicParams) -> np.ndarray:
    return 0.5 * params.a * np.eye(M.shape[0]) + 0.5 * params.disc * M


def triple_structure(F, T, kind: TripleKind | str, params: MetallicParams, tol: float = ALGEBRA_TOL) -> TripleResult:
    """Metallic images of (F, T, K = T F) and the relation tying J_K to J_F, J_T."""
    kind = TripleKind(kind)
    F = np.asarray(F, dtype=float)
    T = np.asarray(T, dtype=float)
    eye = np.eye(F.shape[0])
    sign = kind.square
    checks = {
        f"F^2 = {'+' if sign > 0 else '-'}I": max_norm(F @ F - sign * eye),
        f"T^2 = {'+' if sign > 0 else '-'}I": max_norm(T @ T - sign * eye),
        ("TF = FT" if kind.commuting else "TF = -FT"): max_norm(
            T @ F - F @ T if kind.commuting else T @ F + F @ T
        ),
    }
    for identity, r in checks.items():
        if r > tol:
            raise PreconditionError(f"{kind.value} requires {identity}", None, r)

    K = T @ F
    J_F, J_T, J_K = (_structure_matrix(M, params) for M in (F, T, K))
    a, b, rho = params.a, params.b, params.rho
    relation = params.disc * J_K - (2 * J_T @ J_F - a * J_T - a * J_F + (rho * rho - b) * eye)
    if kind.commuting:
        pair = J_F @ J_T - J_T @ J_F
    else:
        pair = J_T @ J_F + J_F @ J_T - a * (J_T + J_F) + 0.5 * a * a * eye
    factor_kind = StructureKind.METALLIC if sign > 0 else StructureKind.COMPLEX_METALLIC
    jk_kind = StructureKind.METALLIC if kind in (TripleKind.AHP, TripleKind.APBC) else StructureKind.COMPLEX_METALLIC
    return TripleResult(
        kind=kind,
        J_F=J_F,
        J_T=J_T,
        J_K=J_K,
        relation_residual=max_norm(relation),
        pair_residual=max_norm(pair),
        factor_kind=factor_kind,
        J_K_kind=jk_kind,
        J_K_residual=polynomial_residual(J_K, params, jk_kind),
    )


def canonical_pair(kind: TripleKind | str) -> tuple[np.ndarray, np.ndarray]:
    """A standard (F, T) pair realizing each triple kind."""
    kind = TripleKind(kind)
    if kind is TripleKind.AHP:
        return np.diag([1.0, -1.0, 1.0, -1.0]), np.diag([1.0, 1.0, -1.0, -1.0])
    if kind is TripleKind.ABPC:
        return clifford_generators()
    ri, rj = quaternion_units("right")["i"], quaternion_units("right")["j"]
    if kind is TripleKind.APBC:
        # left and right multiplications commute
        return quaternion_units("left")["i"], rj
    return ri, rj


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix from the QR factorization of a Gaussian matrix."""
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def random_pair(kind: TripleKind | str, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Canonical pair conjugated by a random orthogonal matrix."""
    F, T = canonical_pair(kind)
    Q = random_orthogonal(F.shape[0], rng)
    return Q @ F @ Q.T, Q @ T @ Q.T

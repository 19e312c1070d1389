import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metalgeom.chart import Chart, TensorField11, max_norm
from metalgeom.errors import PreconditionError
from metalgeom.families import Family2DSpec, family_2d
from metalgeom.metallic import (
    NAMED_MEANS,
    MetallicParams,
    StructureKind,
    annihilating_spectrum_check,
    complex_metallic,
    conjugate,
    from_product,
    inverse_structure,
    is_metallic,
    metallic_from_projector,
    metallic_ratio,
    metallic_residual,
    polynomial_residual,
    projector_eigen_residual,
    projector_residuals,
    projectors,
    secondary_fibonacci,
    tangent_metallic,
    to_product,
)
from metalgeom.randfields import random_product_structure

from conftest import GOLDEN, r2_fields, safe_points

SQ5 = math.sqrt(5)


def diag_J(chart, params):
    return TensorField11.constant(chart, np.diag([params.rho, params.a - params.rho]))


@pytest.mark.parametrize(
    "a, b, expected",
    [(1, 1, 1.6180339887498949), (2, 1, 2.414213562373095), (1, 2, 2.0), (3, 1, 3.302775637731995)],
)
def test_named_ratios(a, b, expected):
    assert metallic_ratio(a, b) == pytest.approx(expected, abs=1e-15)


def test_named_means_table():
    assert NAMED_MEANS["golden"] == (1, 1)
    assert metallic_ratio(*NAMED_MEANS["nickel"]) == pytest.approx((1 + math.sqrt(13)) / 2, abs=1e-12)


@pytest.mark.parametrize("a, b", [(0, 1), (1, 0), (-1, 1), (1.5, 1), (1, float("nan")), (True, 1), ("1", 1)])
def test_ratio_rejects_bad_parameters(a, b):
    with pytest.raises(ValueError):
        metallic_ratio(a, b)


def test_allow_real():
    assert metallic_ratio(1.5, 0.25, allow_real=True) == pytest.approx((1.5 + math.sqrt(3.25)) / 2)
    with pytest.raises(ValueError):
        MetallicParams(1.5, 1)
    assert MetallicParams(1.5, 1, allow_real=True).disc == pytest.approx(math.sqrt(6.25))


def test_params_invariants_grid():
    for a in range(1, 51):
        for b in range(1, 51):
            p = MetallicParams(a, b)
            assert abs(p.rho**2 - a * p.rho - b) <= 1e-12 * max(1.0, p.rho**2)
            assert abs(p.disc - (2 * p.rho - a)) <= 1e-12


def test_secondary_fibonacci():
    assert secondary_fibonacci(1, 1, 0, 1, 8) == [0, 1, 1, 2, 3, 5, 8, 13]
    seq = secondary_fibonacci(2, 1, 1, 1, 30)
    assert seq[-1] / seq[-2] == pytest.approx(metallic_ratio(2, 1), rel=1e-12)


def test_is_metallic_examples(plane):
    assert is_metallic(diag_J(plane, GOLDEN), GOLDEN).max_residual <= 1e-12
    r = is_metallic(TensorField11.identity(plane), GOLDEN)
    assert not r.passed and r.max_residual == pytest.approx(1.0)


def test_example_is_metallic_for_several_params():
    for a, b in [(1, 1), (2, 1), (3, 2), (1, 3)]:
        params = MetallicParams(a, b)
        _, J, _, _ = r2_fields(params)
        assert is_metallic(J, params, safe_points(100, seed=a * 10 + b), tol=1e-9).passed


def test_is_metallic_reports_domain_error():
    _, J, _, _ = r2_fields(GOLDEN)
    r = is_metallic(J, GOLDEN, [(1, 1), (0, 0)])
    assert not r.passed
    assert r.worst_point == [0.0, 0.0]
    assert "domain error" in r.note


def test_from_product_examples(plane):
    F1 = TensorField11.constant(plane, np.diag([1.0, -1.0]))
    np.testing.assert_allclose(from_product(F1, GOLDEN).matrix((0, 0)), np.diag([GOLDEN.rho, 1 - GOLDEN.rho]))
    I = TensorField11.identity(plane)
    np.testing.assert_allclose(from_product(I, GOLDEN).matrix((0, 0)), GOLDEN.rho * np.eye(2))
    e2 = TensorField11.constant(plane, [[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_allclose(from_product(e2, GOLDEN).matrix((0, 0)), 0.5 * np.array([[1, SQ5], [SQ5, 1]]))


def test_from_product_rejects_non_involution(plane):
    bad = TensorField11.parse(plane, [["x", "0"], ["0", "1"]])
    with pytest.raises(PreconditionError) as info:
        from_product(bad, GOLDEN)
    assert info.value.worst_point is not None


def test_to_product_examples(plane, params):
    F = to_product(diag_J(plane, params), params)
    np.testing.assert_allclose(F.matrix((0, 0)), np.diag([1, -1]), atol=1e-15)
    rhoI = TensorField11.constant(plane, params.rho * np.eye(2))
    np.testing.assert_allclose(to_product(rhoI, params).matrix((0, 0)), np.eye(2), atol=1e-15)
    with pytest.raises(PreconditionError):
        to_product(TensorField11.identity(plane), params)


def test_conjugate_examples(plane, params):
    J = diag_J(plane, params)
    np.testing.assert_allclose(conjugate(J, params).matrix((0, 0)), np.diag([params.a - params.rho, params.rho]))
    J2 = TensorField11.constant(plane, 0.5 * np.array([[params.a, params.disc], [params.disc, params.a]]))
    expected = 0.5 * np.array([[params.a, -params.disc], [-params.disc, params.a]])
    np.testing.assert_allclose(conjugate(J2, params).matrix((0, 0)), expected, atol=1e-15)


def test_inverse_examples(plane):
    Ji = inverse_structure(diag_J(plane, GOLDEN), GOLDEN).matrix((0, 0))
    np.testing.assert_allclose(Ji, np.diag([GOLDEN.rho - 1, -GOLDEN.rho]), atol=1e-15)
    np.testing.assert_allclose(Ji, np.diag([1 / GOLDEN.rho, 1 / (1 - GOLDEN.rho)]), atol=1e-15)
    scalar = TensorField11.constant(plane, GOLDEN.rho * np.eye(2))
    np.testing.assert_allclose(inverse_structure(scalar, GOLDEN).matrix((0, 0)), np.eye(2) / GOLDEN.rho, atol=1e-15)


def test_tangent_examples(plane):
    T = TensorField11.constant(plane, [[0.0, 0.0], [1.0, 0.0]])
    Jt = tangent_metallic(T, GOLDEN).matrix((0, 0))
    np.testing.assert_allclose(Jt, [[0.5, 0], [SQ5 / 2, 0.5]])
    assert polynomial_residual(Jt, GOLDEN, StructureKind.TANGENT_METALLIC) <= 1e-12
    assert metallic_residual(Jt, 1, 1) > 0.1  # not metallic in the ordinary sense
    np.testing.assert_allclose(tangent_metallic(TensorField11.zero(plane), GOLDEN).matrix((0, 0)), 0.5 * np.eye(2))
    with pytest.raises(PreconditionError):
        tangent_metallic(TensorField11.identity(plane), GOLDEN)


def test_complex_examples():
    Jc = complex_metallic(np.array([[0.0, -1.0], [1.0, 0.0]]), GOLDEN)
    np.testing.assert_allclose(Jc, [[0.5, -SQ5 / 2], [SQ5 / 2, 0.5]])
    assert polynomial_residual(Jc, GOLDEN, StructureKind.COMPLEX_METALLIC) <= 1e-12
    ev = np.sort_complex(np.linalg.eigvals(Jc))
    np.testing.assert_allclose(ev, [0.5 - 1j * SQ5 / 2, 0.5 + 1j * SQ5 / 2])
    assert StructureKind.COMPLEX_METALLIC.ratio(GOLDEN) == pytest.approx(0.5 + 1j * SQ5 / 2)
    assert StructureKind.TANGENT_METALLIC.ratio(GOLDEN) == 0.5
    with pytest.raises(PreconditionError):
        complex_metallic(np.eye(2), GOLDEN)


def test_complex_entries_allowed():
    C = np.array([[1j, 0], [0, -1j]])
    Jc = complex_metallic(C, MetallicParams(2, 3))
    assert polynomial_residual(Jc, MetallicParams(2, 3), StructureKind.COMPLEX_METALLIC) <= 1e-12


def test_projectors_of_diagonal(plane, params):
    l, m = projectors(diag_J(plane, params), params)
    np.testing.assert_allclose(l.matrix((0, 0)), np.diag([1, 0]), atol=1e-15)
    np.testing.assert_allclose(m.matrix((0, 0)), np.diag([0, 1]), atol=1e-15)


def test_projectors_of_example_match_stated_fields(params):
    _, J, l_ref, m_ref = r2_fields(params)
    l, m = projectors(J, params)
    for p in safe_points(50, seed=3):
        assert max_norm(l.matrix(p) - l_ref.matrix(p)) <= 1e-12
        assert max_norm(m.matrix(p) - m_ref.matrix(p)) <= 1e-12
        assert max(projector_residuals(J, l, m, params, p).values()) <= 1e-10


def test_metallic_from_projector_examples(plane, params):
    np.testing.assert_allclose(
        metallic_from_projector(TensorField11.zero(plane), params).matrix((0, 0)), params.rho * np.eye(2)
    )
    v = TensorField11.constant(plane, np.diag([0.0, 1.0]))
    np.testing.assert_allclose(
        metallic_from_projector(v, params).matrix((0, 0)), np.diag([params.rho, params.a - params.rho]), atol=1e-14
    )
    with pytest.raises(PreconditionError):
        metallic_from_projector(TensorField11.constant(plane, 2 * np.eye(2)), params)


def test_metallic_from_example_projector(params):
    _, J, _, m = r2_fields(params)
    Jv = metallic_from_projector(m, params, points=safe_points(10, 1))
    for p in safe_points(50, seed=5):
        assert max_norm(Jv.matrix(p) - J.matrix(p)) <= 1e-10
        assert projector_eigen_residual(Jv, m, params, p) <= 1e-10


def test_annihilating_spectrum():
    assert annihilating_spectrum_check(np.diag([GOLDEN.rho, 1 - GOLDEN.rho]), GOLDEN) <= 1e-15
    M = family_2d(Family2DSpec(GOLDEN, r=2.0, s=1.0))
    assert annihilating_spectrum_check(M, GOLDEN) <= 1e-12
    assert annihilating_spectrum_check(np.eye(2), GOLDEN) == pytest.approx(1.0)  # (1 - rho)(rho) = 1 for a=b=1


seeds = st.integers(0, 2**32 - 1)


def _random_J(seed, params):
    space = Chart(("x", "y", "z"))
    F = random_product_structure(space, np.random.default_rng(seed), symmetric=bool(seed % 2))
    return space, F, from_product(F, params, check=False)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, a=st.integers(1, 5), b=st.integers(1, 5), p=st.lists(st.floats(-1, 1), min_size=3, max_size=3))
def test_random_structure_properties(seed, a, b, p):
    params = MetallicParams(a, b)
    space, F, J = _random_J(seed, params)
    Jp = J.matrix(p)
    eye = np.eye(3)
    scale = max(1.0, max_norm(Jp)) ** 2
    assert metallic_residual(Jp, a, b) <= 1e-10 * scale
    # round trip through the product structure
    assert max_norm(to_product(J, params, check=False).matrix(p) - F.matrix(p)) <= 1e-12 * scale
    # conjugate is a metallic involution swapping the projectors
    Jbar = conjugate(J, params)
    assert metallic_residual(Jbar.matrix(p), a, b) <= 1e-10 * scale
    assert max_norm(conjugate(Jbar, params).matrix(p) - Jp) <= 1e-12 * scale
    l, m = projectors(J, params, check=False)
    lbar, _ = projectors(Jbar, params, check=False)
    assert max_norm(lbar.matrix(p) - m.matrix(p)) <= 1e-10 * scale
    # inverse structure
    Ji = inverse_structure(J, params).matrix(p)
    assert max_norm(Jp @ Ji - eye) <= 1e-10 * scale
    assert max_norm(b * Ji @ Ji + a * Ji - eye) <= 1e-10 * scale
    # projector identities
    assert max(projector_residuals(J, l, m, params, p).values()) <= 1e-10 * scale
    # structure from projector agrees with the product route through F = I - 2v
    v = m
    Fv = TensorField11.identity(space) - v * 2.0
    assert max_norm(metallic_from_projector(v, params, check=False).matrix(p) - from_product(Fv, params, check=False).matrix(p)) <= 1e-12 * scale

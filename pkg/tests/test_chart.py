import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metalgeom.chart import (
    Chart,
    MetricField,
    TensorField11,
    VectorField,
    apply,
    frames,
    lie_bracket,
    max_norm,
    nijenhuis,
    nijenhuis_scaling_check,
)
from metalgeom.errors import DomainError
from metalgeom.metallic import MetallicParams, from_product
from metalgeom.randfields import random_product_structure, random_vector_field

from conftest import GOLDEN, r2_fields


def fd_bracket(X, Y, p, h=1e-6):
    """[X,Y] from central differences of the component values."""
    p = np.asarray(p, dtype=float)
    n = p.size

    def jac(V):
        D = np.empty((n, n))
        for j in range(n):
            d = np.zeros(n)
            d[j] = h
            D[:, j] = (V.value(p + d) - V.value(p - d)) / (2 * h)
        return D

    return jac(Y) @ X.value(p) - jac(X) @ Y.value(p)


def contact_F(space):
    return TensorField11.parse(space, [["1", "0", "0"], ["0", "1", "0"], ["0", "2*x", "-1"]])


def test_chart_validation():
    with pytest.raises(ValueError):
        Chart(())
    with pytest.raises(ValueError):
        Chart(("x", "x"))
    with pytest.raises(ValueError):
        Chart(("x", "sin"))
    assert Chart(("r", "theta")).dim == 2


def test_identity_apply(plane):
    X = VectorField.parse(plane, ["x*y", "sin(x)"])
    p = (0.4, -1.3)
    np.testing.assert_allclose(apply(TensorField11.identity(plane), X, p), X.value(p))


def test_example_J_on_dx_at_y_zero(params):
    chart, J, _, _ = r2_fields(params)
    dx = VectorField.frame(chart, 0)
    np.testing.assert_allclose(apply(J, dx, (1, 0)), [params.rho, 0], atol=1e-15)


def test_diagonal_J_on_second_frame(plane, params):
    J1 = TensorField11.constant(plane, np.diag([params.rho, params.a - params.rho]))
    np.testing.assert_allclose(apply(J1, VectorField.constant(plane, [0, 1]), (5, 5)), [0, params.a - params.rho])


def test_frames_commute(plane):
    dx, dy = frames(plane)
    np.testing.assert_array_equal(lie_bracket(dx, dy, (0.3, 0.9)), [0, 0])


@pytest.mark.parametrize("p", [(1.0, 2.0), (-0.5, 0.25), (3.0, -1.0)])
def test_bracket_of_shear_fields(plane, p):
    X = VectorField.parse(plane, ["0", "x"])
    Y = VectorField.parse(plane, ["y", "0"])
    expected = [p[0], -p[1]]
    np.testing.assert_allclose(lie_bracket(X, Y, p), expected, atol=1e-14)
    np.testing.assert_allclose(fd_bracket(X, Y, p), expected, atol=1e-6)


def test_dilation_and_rotation_commute(plane):
    D = VectorField.parse(plane, ["x", "y"])
    R = VectorField.parse(plane, ["y", "-x"])
    for p in [(1, 2), (-0.3, 0.7)]:
        np.testing.assert_allclose(lie_bracket(D, R, p), [0, 0], atol=1e-14)
        np.testing.assert_allclose(fd_bracket(D, R, p), [0, 0], atol=1e-6)


def test_nijenhuis_constant_is_zero(space):
    J = TensorField11.constant(space, np.arange(9.0).reshape(3, 3))
    X = VectorField.constant(space, [1, 2, 3])
    Y = VectorField.constant(space, [0, -1, 5])
    np.testing.assert_array_equal(nijenhuis(J, X, Y, (0.1, 0.2, 0.3)), 0)


def test_example_is_integrable(params):
    chart, J, _, _ = r2_fields(params)
    dx, dy = frames(chart)
    assert max_norm(nijenhuis(J, dx, dy, (1, 1))) <= 1e-12


def test_contact_example_nijenhuis(space):
    F = contact_F(space)
    J = from_product(F, GOLDEN)
    dx, dy, _ = frames(space)
    p = (0.5, 0.0, 0.0)
    np.testing.assert_allclose(nijenhuis(F, dx, dy, p), [0, 0, 4], atol=1e-12)
    np.testing.assert_allclose(nijenhuis(J, dx, dy, p), [0, 0, 5], atol=1e-12)
    assert nijenhuis_scaling_check(J, 1, 1, dx, dy, p) <= 1e-8


def test_scaling_trivial_cases(plane):
    chart, J, _, _ = r2_fields(GOLDEN)
    dx, dy = frames(chart)
    assert nijenhuis_scaling_check(J, 1, 1, dx, dy, (1, 2)) <= 1e-12
    Jc = TensorField11.constant(plane, np.diag([GOLDEN.rho, 1 - GOLDEN.rho]))
    assert nijenhuis_scaling_check(Jc, 1, 1, dx, dy, (1, 2)) == 0


def test_domain_error_propagates():
    chart, J, _, _ = r2_fields(GOLDEN)
    with pytest.raises(DomainError):
        J.matrix((0.0, 0.0))


def test_metric_jet(plane):
    g = MetricField.parse(plane, [["1", "0"], ["0", "x^2"]])
    G, dG = g.jet((2.0, 1.0))
    np.testing.assert_allclose(G, np.diag([1, 4]))
    assert dG[1, 1, 0] == pytest.approx(4.0)
    assert np.count_nonzero(dG) == 1


def test_compose_matches_matrix_product(plane):
    A = TensorField11.parse(plane, [["x", "1"], ["y^2", "2"]])
    B = TensorField11.parse(plane, [["0", "x*y"], ["1", "-1"]])
    p = (0.3, -0.8)
    np.testing.assert_allclose((A @ B).matrix(p), A.matrix(p) @ B.matrix(p))


seeds = st.integers(0, 2**32 - 1)
coords = st.floats(-1, 1)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, x=coords, y=coords, z=coords)
def test_nijenhuis_antisymmetric(seed, x, y, z):
    space = Chart(("x", "y", "z"))
    rng = np.random.default_rng(seed)
    J = from_product(random_product_structure(space, rng, symmetric=False), GOLDEN, check=False)
    X, Y = random_vector_field(space, rng), random_vector_field(space, rng)
    p = (x, y, z)
    assert max_norm(nijenhuis(J, X, Y, p) + nijenhuis(J, Y, X, p)) <= 1e-9
    assert max_norm(nijenhuis(J, X, X, p)) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(seed=seeds, c=st.floats(-3, 3), x=coords, y=coords)
def test_bracket_bilinear(seed, c, x, y):
    plane = Chart(("x", "y"))
    rng = np.random.default_rng(seed)
    X1, X2, Y = (random_vector_field(plane, rng) for _ in range(3))
    p = (x, y)
    lhs = lie_bracket(X1 * c + X2, Y, p)
    rhs = c * lie_bracket(X1, Y, p) + lie_bracket(X2, Y, p)
    assert max_norm(lhs - rhs) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(seed=seeds, x=coords, y=coords)
def test_bracket_matches_finite_differences(seed, x, y):
    plane = Chart(("x", "y"))
    rng = np.random.default_rng(seed)
    X, Y = random_vector_field(plane, rng), random_vector_field(plane, rng)
    ad = lie_bracket(X, Y, (x, y))
    fd = fd_bracket(X, Y, (x, y))
    assert np.all(np.abs(ad - fd) <= 1e-5 * np.maximum(1.0, np.abs(ad)))


@settings(max_examples=25, deadline=None)
@given(seed=seeds, a=st.integers(1, 4), b=st.integers(1, 4), x=coords, y=coords, z=coords)
def test_scaling_on_random_structures(seed, a, b, x, y, z):
    space = Chart(("x", "y", "z"))
    params = MetallicParams(a, b)
    rng = np.random.default_rng(seed)
    J = from_product(random_product_structure(space, rng, symmetric=bool(seed % 2)), params, check=False)
    X, Y = random_vector_field(space, rng), random_vector_field(space, rng)
    assert nijenhuis_scaling_check(J, a, b, X, Y, (x, y, z)) <= 1e-8

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvedfem import element as el
from curvedfem.errors import DegenerateElementError
from curvedfem.geometry import element_nodes
from curvedfem.quadrature import quadrature_rule
from oracles import central_difference, shape_funcs

ref_point = st.tuples(st.floats(0, 1), st.floats(0, 1)).filter(lambda p: p[0] + p[1] <= 1)


def random_ref_points(n, seed):
    rng = np.random.default_rng(seed)
    p = rng.uniform(0, 1, (n, 2))
    flip = p.sum(axis=1) > 1
    p[flip] = 1 - p[flip]
    return p


def test_kronecker_delta_exact():
    N = el.shape_values(el.REFERENCE_NODES[:, 0], el.REFERENCE_NODES[:, 1])
    assert np.array_equal(np.round(N, 12), np.eye(10))
    assert np.abs(N - np.eye(10)).max() < 1e-13
    exact = np.array([[Fraction(round(3 * v), 3) for v in p] for p in el.REFERENCE_NODES], dtype=object)
    assert np.array_equal(el.shape_values(exact[:, 0], exact[:, 1]), np.eye(10, dtype=int))


@pytest.mark.parametrize(
    "point, node",
    [((0.0, 0.0), 2), ((1 / 3, 1 / 3), 9), ((1 / 3, 0.0), 7), ((2 / 3, 0.0), 8)],
)
def test_shape_values_at_nodes(point, node):
    N = el.shape_values(*point)
    expected = np.zeros(10)
    expected[node] = 1.0
    np.testing.assert_allclose(N, expected, atol=1e-14)


def test_matches_symbolic_shape_functions():
    values, grads = shape_funcs()
    p = random_ref_points(200, 3)
    np.testing.assert_allclose(el.shape_values(p[:, 0], p[:, 1]), values(p[:, 0], p[:, 1]), atol=1e-13)
    np.testing.assert_allclose(el.shape_gradients(p[:, 0], p[:, 1]), grads(p[:, 0], p[:, 1]), atol=1e-12)


def test_partition_of_unity_and_gradient_sum():
    p = random_ref_points(1000, 0)
    N = el.shape_values(p[:, 0], p[:, 1])
    G = el.shape_gradients(p[:, 0], p[:, 1])
    assert np.abs(N.sum(axis=1) - 1).max() < 1e-12
    assert np.abs(G.sum(axis=1)).max() < 1e-12


@settings(max_examples=200, deadline=None)
@given(ref_point)
def test_partition_of_unity_property(p):
    assert abs(el.shape_values(*p).sum() - 1) < 1e-12
    assert np.abs(el.shape_gradients(*p).sum(axis=0)).max() < 1e-12


def test_gradient_of_n1_at_vertex():
    assert el.shape_gradients(1.0, 0.0)[0, 0] == pytest.approx(5.5, abs=1e-14)


def test_gradients_match_finite_differences():
    for p in random_ref_points(50, 1):
        fd = central_difference(lambda x, y: el.shape_values(x, y), p, 1e-6)
        assert np.abs(el.shape_gradients(*p) - fd).max() < 1e-6


def test_identity_map(identity_mesh):
    coords = identity_mesh.element_coords(0)
    p = random_ref_points(20, 2)
    np.testing.assert_allclose(el.map_point(coords, p[:, 0], p[:, 1]), p, atol=1e-15)
    jac = el.jacobian(coords, 0.3, 0.2)
    np.testing.assert_allclose(jac.matrix, np.eye(2), atol=1e-15)
    assert jac.det == pytest.approx(1.0)
    np.testing.assert_allclose(el.physical_gradients(coords, 0.3, 0.2), el.shape_gradients(0.3, 0.2), atol=1e-14)


def test_quarter_circle_map(quarter_circle_coords):
    mapped = el.map_point(quarter_circle_coords, 0.5, 0.5)
    np.testing.assert_allclose(mapped, [0.724278, 0.6875], atol=1e-6)
    # recomputed from the mapped point: sqrt(0.724278^2 + 0.6875^2)
    assert np.linalg.norm(mapped) == pytest.approx(0.998617, abs=1e-6)
    np.testing.assert_allclose(el.bilinear_coefficient(quarter_circle_coords), 2.25 * np.array([0.398717, 1 / 3]), atol=1e-5)


def test_map_reproduces_vertices_and_nodes(quarter_circle_coords):
    c = quarter_circle_coords
    got = el.map_point(c, el.REFERENCE_NODES[:, 0], el.REFERENCE_NODES[:, 1])
    np.testing.assert_array_equal(got[:3], c[:3])
    np.testing.assert_allclose(got, c, atol=1e-14)


def test_straight_element_determinant_is_twice_area():
    coords = element_nodes((2.0, 0.0), (0.0, 1.0), (0.0, 0.0))
    np.testing.assert_allclose(el.bilinear_coefficient(coords), 0.0, atol=1e-12)
    for p in random_ref_points(10, 4):
        assert el.jacobian(coords, *p).det == pytest.approx(2.0, abs=1e-12)


def test_curved_jacobian_matches_finite_difference(quarter_circle_coords):
    c = quarter_circle_coords
    for p in quadrature_rule(8).points:
        jac = el.jacobian(c, *p)
        fd = central_difference(lambda x, y: el.map_point(c, x, y), p, 1e-6)
        assert jac.det > 0
        assert np.abs(jac.matrix - fd).max() < 1e-8
        np.testing.assert_allclose(jac.matrix @ jac.inverse, np.eye(2), atol=1e-10)


def test_affine_element_reproduces_linear_field():
    coords = element_nodes((0.9, 0.2), (0.3, 0.8), (0.1, 0.1))
    u = coords[:, 0] + 2 * coords[:, 1]
    for p in quadrature_rule(8).points:
        np.testing.assert_allclose(u @ el.physical_gradients(coords, *p), [1.0, 2.0], atol=1e-10)


def test_curved_element_reproduces_coordinate_field(quarter_circle_coords):
    c = quarter_circle_coords
    for p in quadrature_rule(8).points:
        g = el.physical_gradients(c, *p)
        np.testing.assert_allclose(c[:, 0] @ g, [1.0, 0.0], atol=1e-10)
        np.testing.assert_allclose(c[:, 1] @ g, [0.0, 1.0], atol=1e-10)


def test_curved_element_interpolates_its_own_geometry(quarter_circle_coords):
    # the quadratic map lies in the cubic span: sum N_i t_i == map
    p = random_ref_points(30, 5)
    N = el.shape_values(p[:, 0], p[:, 1])
    np.testing.assert_allclose(N @ quarter_circle_coords, el.map_point(quarter_circle_coords, p[:, 0], p[:, 1]), atol=1e-13)


def test_degenerate_element_raises():
    coords = element_nodes((0.0, 0.0), (1.0, 1.0), (2.0, 2.0))
    with pytest.raises(DegenerateElementError) as info:
        el.jacobian(coords, 0.2, 0.2)
    assert "0.2" in str(info.value)


def test_clockwise_element_raises():
    coords = element_nodes((0.0, 1.0), (1.0, 0.0), (0.0, 0.0))
    with pytest.raises(DegenerateElementError):
        el.physical_gradients(coords, 0.1, 0.1)

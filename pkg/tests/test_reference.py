from math import factorial

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tdcshell.errors import ParameterError
from tdcshell.reference import (P2_EDGES, REFERENCE_NODES, quadrature, quadrature_for_geometry,
                                reference_element, shape_gradients, shape_values)

unit = st.floats(0.0, 1.0, allow_nan=False)


@pytest.mark.parametrize("degree", [1, 2])
def test_kronecker_delta_at_nodes(degree):
    X = REFERENCE_NODES[degree]
    np.testing.assert_allclose(shape_values(degree, X[:, 0], X[:, 1]), np.eye(len(X)),
                               atol=1e-15)


@pytest.mark.parametrize("degree", [1, 2])
def test_partition_of_unity_at_random_points(degree, rng):
    pts = rng.random((100, 2))
    pts = np.where(pts.sum(1, keepdims=True) > 1, 1 - pts, pts)
    phi = shape_values(degree, pts[:, 0], pts[:, 1])
    dphi = shape_gradients(degree, pts[:, 0], pts[:, 1])
    assert np.abs(phi.sum(-1) - 1).max() <= 1e-14
    assert np.abs(dphi.sum(-2)).max() <= 1e-14


@given(unit, unit)
def test_gradient_matches_difference_quotient(a, b):
    xi, eta = a * (1 - b), b * 0.999
    h = 1e-6
    for degree in (1, 2):
        g = shape_gradients(degree, xi, eta)
        dx = (shape_values(degree, xi + h, eta) - shape_values(degree, xi - h, eta)) / (2 * h)
        dy = (shape_values(degree, xi, eta + h) - shape_values(degree, xi, eta - h)) / (2 * h)
        np.testing.assert_allclose(g[:, 0], dx, atol=1e-8)
        np.testing.assert_allclose(g[:, 1], dy, atol=1e-8)


def _monomial_integral(a, b):
    return factorial(a) * factorial(b) / factorial(a + b + 2)


@pytest.mark.parametrize("geometry_order,exact", [(1, 2), (2, 5)])
def test_quadrature_degree(geometry_order, exact):
    rule = quadrature_for_geometry(geometry_order)
    assert rule.degree == exact
    x, y = rule.points.T
    for a in range(exact + 1):
        for b in range(exact + 1 - a):
            q = np.sum(rule.weights * x ** a * y ** b)
            assert q == pytest.approx(_monomial_integral(a, b), rel=1e-13, abs=1e-16)
    assert len(rule.weights) == (3 if exact == 2 else 7)
    assert np.all(rule.weights > 0)


def test_seven_point_rule_not_exact_for_degree_six():
    rule = quadrature(5)
    x, y = rule.points.T
    errs = [abs(np.sum(rule.weights * x ** a * y ** (6 - a)) - _monomial_integral(a, 6 - a))
            for a in range(7)]
    assert max(errs) > 1e-8


def test_midside_nodes_sit_on_opposite_edges():
    X = REFERENCE_NODES[2]
    for k, (i, j) in enumerate(P2_EDGES):
        np.testing.assert_allclose(X[3 + k], 0.5 * (X[i] + X[j]))
        assert k not in (i, j)


def test_reference_element_caches_rule_values():
    ref = reference_element(2)
    assert ref.phi.shape == (7, 6) and ref.dphi.shape == (7, 6, 2)
    assert ref.n_nodes == 6
    with pytest.raises(ParameterError):
        reference_element(3)
    with pytest.raises(ParameterError):
        quadrature(6)

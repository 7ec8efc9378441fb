"""Reference triangle: Lagrange shape functions and quadrature.

The reference triangle has vertices (0, 0), (1, 0), (0, 1). Quadratic
elements append three midside nodes after the vertices, with midside
node ``3 + k`` sitting on the edge opposite vertex ``k``::

    node 3 -> edge (1, 2)
    node 4 -> edge (2, 0)
    node 5 -> edge (0, 1)
"""
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

# local vertex pairs of the edges carrying midside nodes 3, 4, 5
P2_EDGES = ((1, 2), (2, 0), (0, 1))

REFERENCE_NODES = {
    1: np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
    2: np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0],
                 [0.5, 0.5], [0.0, 0.5], [0.5, 0.0]]),
}


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray  # (nq, 2) reference coordinates
    weights: np.ndarray  # (nq,), sum = 1/2
    degree: int


def _strang_fix_7():
    s = np.sqrt(15.0)
    a, b = (6.0 - s) / 21.0, (6.0 + s) / 21.0
    wa, wb = (155.0 - s) / 2400.0, (155.0 + s) / 2400.0
    pts = [(1 / 3, 1 / 3),
           (a, a), (1 - 2 * a, a), (a, 1 - 2 * a),
           (b, b), (1 - 2 * b, b), (b, 1 - 2 * b)]
    wts = [9.0 / 80.0, wa, wa, wa, wb, wb, wb]
    return np.array(pts), np.array(wts)


def quadrature(degree):
    """Triangle quadrature exact for polynomials of the given degree (<= 5)."""
    if degree <= 1:
        return QuadratureRule(np.array([[1 / 3, 1 / 3]]), np.array([0.5]), 1)
    if degree == 2:
        pts = np.array([[1 / 6, 1 / 6], [2 / 3, 1 / 6], [1 / 6, 2 / 3]])
        return QuadratureRule(pts, np.full(3, 1 / 6), 2)
    if degree <= 5:
        pts, wts = _strang_fix_7()
        return QuadratureRule(pts, wts, 5)
    raise ParameterError(f"no quadrature rule of degree {degree}")


def quadrature_for_geometry(geometry_order):
    """3-point rule for flat facets, 7-point rule for quadratic geometry."""
    return quadrature(2 if geometry_order == 1 else 5)


def shape_values(degree, xi, eta):
    """Shape function values, shape ``xi.shape + (n_nodes,)``."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    l0 = 1.0 - xi - eta
    if degree == 1:
        return np.stack([l0, xi, eta], axis=-1)
    if degree == 2:
        return np.stack([
            l0 * (2 * l0 - 1),
            xi * (2 * xi - 1),
            eta * (2 * eta - 1),
            4 * xi * eta,
            4 * eta * l0,
            4 * xi * l0,
        ], axis=-1)
    raise ParameterError(f"unsupported element degree {degree}")


def shape_gradients(degree, xi, eta):
    """Reference gradients, shape ``xi.shape + (n_nodes, 2)``."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    one = np.ones_like(xi)
    if degree == 1:
        dxi = np.stack([-one, one, 0 * one], axis=-1)
        deta = np.stack([-one, 0 * one, one], axis=-1)
    elif degree == 2:
        l0 = 1.0 - xi - eta
        dxi = np.stack([
            -(4 * l0 - 1),
            4 * xi - 1,
            0 * one,
            4 * eta,
            -4 * eta,
            4 * (l0 - xi),
        ], axis=-1)
        deta = np.stack([
            -(4 * l0 - 1),
            0 * one,
            4 * eta - 1,
            4 * xi,
            4 * (l0 - eta),
            -4 * xi,
        ], axis=-1)
    else:
        raise ParameterError(f"unsupported element degree {degree}")
    return np.stack([dxi, deta], axis=-1)


@dataclass(frozen=True)
class ReferenceElement:
    """Lagrange triangle of a given degree together with its quadrature rule.

    Values and gradients at the quadrature points are precomputed in
    ``phi`` (nq, n) and ``dphi`` (nq, n, 2).
    """

    degree: int
    rule: QuadratureRule

    @property
    def n_nodes(self):
        return 3 if self.degree == 1 else 6

    @property
    def nodes(self):
        return REFERENCE_NODES[self.degree]

    def shape(self, xi, eta):
        return shape_values(self.degree, xi, eta)

    def grad(self, xi, eta):
        return shape_gradients(self.degree, xi, eta)

    @property
    def phi(self):
        p = self.rule.points
        return self.shape(p[:, 0], p[:, 1])

    @property
    def dphi(self):
        p = self.rule.points
        return self.grad(p[:, 0], p[:, 1])


def reference_element(degree, rule=None):
    if degree not in (1, 2):
        raise ParameterError(f"element degree must be 1 or 2, got {degree}")
    if rule is None:
        rule = quadrature_for_geometry(degree)
    return ReferenceElement(degree, rule)

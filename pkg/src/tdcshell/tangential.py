"""Discrete tangential calculus on triangulated surfaces.

At every quadrature point the extended Jacobian

    J = [dX/dxi; dX/deta; N]

(rows) is inverted, and physical gradients of the shape functions are
obtained as ``J^{-1} (dphi/dxi, dphi/deta, 0)``. The third row makes
these gradients orthogonal to the discrete normal, so they are surface
gradients without an explicit projection.
"""
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError
from .reference import quadrature_for_geometry, reference_element


@dataclass(frozen=True)
class ElementFrame:
    """Geometric data at one quadrature point of one element."""

    normal: np.ndarray  # (3,)
    projector: np.ndarray  # (3, 3)
    jacobian_inv: np.ndarray  # (3, 3)
    grads: np.ndarray  # (n_shape, 3)
    weight: float
    point: np.ndarray  # (3,)
    phi: np.ndarray  # (n_shape,)


@dataclass(frozen=True)
class FrameSet:
    """Batched frames: leading axes are (element, quadrature point)."""

    normal: np.ndarray  # (ne, nq, 3)
    jacobian_inv: np.ndarray  # (ne, nq, 3, 3)
    grads: np.ndarray  # (ne, nq, n_shape, 3)
    weight: np.ndarray  # (ne, nq)
    points: np.ndarray  # (ne, nq, 3)
    phi: np.ndarray  # (nq, n_shape), shared by all elements

    @property
    def projector(self):
        n = self.normal
        return np.eye(3) - n[..., :, None] * n[..., None, :]

    def __getitem__(self, idx):
        return FrameSet(self.normal[idx], self.jacobian_inv[idx], self.grads[idx],
                        self.weight[idx], self.points[idx], self.phi)

    def element(self, e):
        """Unbatched frames of element ``e``."""
        P = self.projector[e]
        return [ElementFrame(self.normal[e, q], P[q], self.jacobian_inv[e, q],
                             self.grads[e, q], float(self.weight[e, q]),
                             self.points[e, q], self.phi[q])
                for q in range(self.weight.shape[1])]


def compute_frames(nodes, elements, geometry_order, shape_degree, rule=None,
                   element_ids=None):
    """Frames for all elements of a mesh given as raw arrays.

    ``elements`` holds geometry connectivity; the returned gradients are
    those of the degree-``shape_degree`` Lagrange basis (its nodes are the
    first 3 or 6 entries of each element row).
    """
    if rule is None:
        rule = quadrature_for_geometry(geometry_order)
    geo = reference_element(geometry_order, rule)
    shp = reference_element(shape_degree, rule)
    Xe = np.asarray(nodes)[np.asarray(elements)]  # (ne, ng, 3)
    nq, ng = geo.dphi.shape[:2]
    D = np.swapaxes(geo.dphi, 1, 2).reshape(nq * 2, ng)
    tangents = np.matmul(D, Xe).reshape(len(Xe), nq, 2, 3)
    cross = np.cross(tangents[..., 0, :], tangents[..., 1, :])
    jac = np.linalg.norm(cross, axis=-1)
    scale = np.max(np.abs(tangents), axis=(-1, -2)) ** 2
    bad = ~(jac > 1e-14 * scale)
    if bad.any():
        e = int(np.nonzero(bad.any(axis=1))[0][0])
        if element_ids is not None:
            e = int(element_ids[e])
        raise GeometryError(f"degenerate element {e}: singular extended Jacobian", element=e)
    normal = cross / jac[..., None]
    # rows t1, t2, N with N orthogonal to both: inverse is [T^T g^-1 | N], g = T T^T
    g = np.matmul(tangents, np.swapaxes(tangents, -1, -2))
    det = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]
    ginv = np.stack([np.stack([g[..., 1, 1], -g[..., 0, 1]], -1),
                     np.stack([-g[..., 1, 0], g[..., 0, 0]], -1)], -2) / det[..., None, None]
    dual = np.matmul(np.swapaxes(tangents, -1, -2), ginv)  # (ne, nq, 3, 2)
    Jinv = np.concatenate([dual, normal[..., :, None]], axis=-1)
    grads = np.matmul(shp.dphi[None], np.swapaxes(dual, -1, -2))
    points = np.matmul(geo.phi, Xe)
    return FrameSet(normal, Jinv, grads, jac * rule.weights, points, shp.phi)


def element_frames(mesh, element_index, reference=None):
    """List of ``ElementFrame`` (one per quadrature point) for one element.

    ``reference`` selects the shape-function basis whose physical
    gradients are returned; it defaults to the geometry basis.
    """
    degree = mesh.geometry_order if reference is None else reference.degree
    rule = quadrature_for_geometry(mesh.geometry_order)
    fs = compute_frames(mesh.nodes, mesh.elements[[element_index]], mesh.geometry_order,
                        degree, rule, element_ids=[element_index])
    return fs.element(0)


def surface_gradient(frames, nodal_vectors):
    """Surface gradient ``Grad_G u = (grad_G (x) u)^T`` at each quadrature point.

    ``frames`` is a list of ``ElementFrame`` or a ``FrameSet``;
    ``nodal_vectors`` has shape (n_shape, 3) for a single element or
    (ne, n_shape, 3) for a ``FrameSet``. Entry ``[i, J]`` is ``du_i/dX_J``.
    """
    u = np.asarray(nodal_vectors, dtype=float)
    if isinstance(frames, FrameSet):
        return np.einsum("eai,eqaj->eqij", u, frames.grads)
    return np.stack([np.einsum("ai,aj->ij", u, f.grads) for f in frames])

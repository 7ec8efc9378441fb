"""Lagrange displacement spaces on a surface mesh."""
import numpy as np

from .errors import ParameterError
from .reference import quadrature_for_geometry
from .tangential import compute_frames


class FESpace:
    """Continuous P1 or P2 vector field over a ``SurfaceMesh``.

    Super-parametric use (P1 on a P2 mesh) carries degrees of freedom on
    the vertex nodes only. DOF nodes are numbered ``0..n_dof_nodes-1`` in
    increasing mesh-node order and the vector DOF of component ``i`` at DOF
    node ``a`` is ``3 * a + i``.

    Frames are evaluated once, on the reference configuration.
    """

    def __init__(self, mesh, degree=None):
        if degree is None:
            degree = mesh.geometry_order
        if degree not in (1, 2):
            raise ParameterError("displacement degree must be 1 or 2")
        if degree > mesh.geometry_order:
            raise ParameterError("P2 displacements need a P2 geometry mesh")
        self.mesh = mesh
        self.degree = degree
        self.rule = quadrature_for_geometry(mesh.geometry_order)
        local = mesh.elements[:, :3] if degree == 1 else mesh.elements
        self.dof_nodes = np.unique(local)
        remap = -np.ones(mesh.n_nodes, dtype=np.int64)
        remap[self.dof_nodes] = np.arange(len(self.dof_nodes))
        self.node_to_dof = remap
        self.cells = remap[local]
        self.frames = compute_frames(mesh.nodes, mesh.elements, mesh.geometry_order,
                                     degree, self.rule)

    @property
    def n_dof_nodes(self):
        return len(self.dof_nodes)

    @property
    def n_dofs(self):
        return 3 * len(self.dof_nodes)

    @property
    def n_shape(self):
        return self.cells.shape[1]

    def cell_dofs(self):
        """(ne, 3 * n_shape) global vector DOFs, node-major."""
        c = self.cells
        return (3 * c[:, :, None] + np.arange(3)).reshape(len(c), -1)

    def dof_coordinates(self):
        return self.mesh.nodes[self.dof_nodes]

    @property
    def boundary(self):
        """Boundary flag per DOF node."""
        return self.mesh.boundary[self.dof_nodes]

    def interpolate(self, fn):
        """Nodal values (n_dof_nodes, 3) of ``fn(X)`` at DOF nodes."""
        return np.asarray(fn(self.dof_coordinates()), dtype=float).reshape(-1, 3)

    def to_mesh_nodes(self, u):
        """Extend nodal vectors to every mesh node (midside values interpolated)."""
        u = np.asarray(u).reshape(-1, 3)
        out = np.zeros((self.mesh.n_nodes, 3))
        out[self.dof_nodes] = u
        if self.degree == 1 and self.mesh.geometry_order == 2:
            el = self.mesh.elements
            for k, (a, b) in enumerate(((1, 2), (2, 0), (0, 1))):
                out[el[:, 3 + k]] = 0.5 * (out[el[:, a]] + out[el[:, b]])
        return out

    def values_at_quadrature(self, u):
        """(ne, nq, 3) field values at quadrature points."""
        u = np.asarray(u).reshape(-1, 3)
        return np.einsum("qa,eai->eqi", self.frames.phi, u[self.cells])

    def l2_norm(self, values):
        """L2 norm over the discrete surface of quadrature-point data (ne, nq, ...)."""
        v = np.asarray(values)
        sq = v ** 2 if v.ndim == 2 else np.sum(v ** 2, axis=tuple(range(2, v.ndim)))
        return float(np.sqrt(np.sum(sq * self.frames.weight)))

    def area(self):
        return float(self.frames.weight.sum())

"""Triangulated surface meshes and analytic-surface generators."""
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .reference import P2_EDGES


def _readonly(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


def edge_table(triangles):
    """Unique undirected edges of a triangle list.

    Returns ``(edges, tri_edges)``: ``edges`` (n_edges, 2) sorted vertex
    pairs and ``tri_edges`` (n_tri, 3) giving, for every triangle, the edge
    opposite each local vertex (the P2 midside convention).
    """
    triangles = np.asarray(triangles)
    local = np.array(P2_EDGES)
    pairs = triangles[:, local]  # (nt, 3, 2)
    flat = np.sort(pairs.reshape(-1, 2), axis=1)
    edges, inverse = np.unique(flat, axis=0, return_inverse=True)
    return edges, inverse.reshape(-1, 3)


@dataclass(frozen=True, eq=False)
class SurfaceMesh:
    """Immutable triangle surface mesh of geometry order 1 or 2.

    Quadratic elements list their three vertices first, then the midside
    nodes of edges (1, 2), (2, 0), (0, 1). ``boundary`` flags every node
    lying on an edge that belongs to a single element (midside nodes of
    such edges included).
    """

    nodes: np.ndarray
    elements: np.ndarray
    geometry_order: int = 1
    boundary: np.ndarray = field(default=None)

    def __post_init__(self):
        nodes = _readonly(self.nodes, float)
        elements = _readonly(self.elements, np.int64)
        if nodes.ndim != 2 or nodes.shape[1] != 3:
            raise ParameterError("nodes must have shape (n, 3)")
        if self.geometry_order not in (1, 2):
            raise ParameterError("geometry_order must be 1 or 2")
        expected = 3 if self.geometry_order == 1 else 6
        if elements.ndim != 2 or elements.shape[1] != expected:
            raise ParameterError(
                f"geometry order {self.geometry_order} needs {expected} nodes per element"
            )
        if elements.size and (elements.min() < 0 or elements.max() >= len(nodes)):
            raise ParameterError("element index out of range")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "elements", elements)
        if self.boundary is None:
            object.__setattr__(self, "boundary", _readonly(self._find_boundary(), bool))
        else:
            object.__setattr__(self, "boundary", _readonly(self.boundary, bool))

    def _find_boundary(self):
        flags = np.zeros(len(self.nodes), dtype=bool)
        if not len(self.elements):
            return flags
        edges, tri_edges = edge_table(self.elements[:, :3])
        counts = np.bincount(tri_edges.ravel(), minlength=len(edges))
        on_bdry = counts == 1
        flags[edges[on_bdry].ravel()] = True
        if self.geometry_order == 2:
            mids = self.elements[:, 3:]
            flags[mids[on_bdry[tri_edges]]] = True
        return flags

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def n_elements(self):
        return len(self.elements)

    @property
    def triangles(self):
        """Vertex connectivity (n_elements, 3)."""
        return self.elements[:, :3]

    @property
    def vertex_nodes(self):
        return np.unique(self.triangles)

    def edges(self):
        return edge_table(self.triangles)[0]

    def edge_counts(self):
        edges, tri_edges = edge_table(self.triangles)
        return edges, np.bincount(tri_edges.ravel(), minlength=len(edges))

    def with_nodes(self, nodes):
        """Same connectivity and boundary flags, new coordinates."""
        return SurfaceMesh(nodes, self.elements, self.geometry_order, self.boundary)

    def transformed(self, rotation=None, shift=None):
        x = np.asarray(self.nodes)
        if rotation is not None:
            x = x @ np.asarray(rotation).T
        if shift is not None:
            x = x + np.asarray(shift)
        return self.with_nodes(x)

    def linear(self):
        """Drop midside nodes; returns the flat-facet mesh on the vertices."""
        if self.geometry_order == 1:
            return self
        verts = self.vertex_nodes
        remap = -np.ones(self.n_nodes, dtype=np.int64)
        remap[verts] = np.arange(len(verts))
        return SurfaceMesh(self.nodes[verts], remap[self.triangles], 1,
                           self.boundary[verts])

    def bounding_box_diagonal(self):
        return float(np.linalg.norm(self.nodes.max(axis=0) - self.nodes.min(axis=0)))

    def max_edge_length(self):
        e = self.edges()
        return float(np.linalg.norm(self.nodes[e[:, 0]] - self.nodes[e[:, 1]], axis=1).max())


def make_quadratic(nodes, triangles, project=None):
    """Add one midside node per edge and return a P2 ``SurfaceMesh``.

    ``project`` maps chord midpoints (k, 3) onto the exact surface; when
    omitted the midpoints are kept (a flat P2 mesh).
    """
    nodes = np.asarray(nodes, dtype=float)
    triangles = np.asarray(triangles, dtype=np.int64)
    edges, tri_edges = edge_table(triangles)
    mid = 0.5 * (nodes[edges[:, 0]] + nodes[edges[:, 1]])
    if project is not None:
        mid = project(mid)
    all_nodes = np.vstack([nodes, mid])
    elements = np.hstack([triangles, len(nodes) + tri_edges])
    return SurfaceMesh(all_nodes, elements, 2)


def _check_positive(**kw):
    for name, v in kw.items():
        if not np.isfinite(v) or v <= 0:
            raise ParameterError(f"{name} must be positive, got {v}")


def _check_order(geometry_order):
    if geometry_order not in (1, 2):
        raise ParameterError(f"geometry_order must be 1 or 2, got {geometry_order}")


def generate_cylinder(radius, height, axial_divisions, circumferential_divisions,
                      geometry_order=2):
    """Open cylinder about the z-axis, z in [-height/2, height/2].

    The lateral surface is split into ``axial_divisions`` rings of
    quadrilaterals, each cut into two triangles along alternating
    diagonals. Normals point outward.
    """
    _check_positive(radius=radius, height=height)
    _check_order(geometry_order)
    n, m = int(axial_divisions), int(circumferential_divisions)
    if n < 1 or m < 3:
        raise ParameterError("need axial_divisions >= 1 and circumferential_divisions >= 3")
    theta = 2 * np.pi * np.arange(m) / m
    z = np.linspace(-height / 2, height / 2, n + 1)
    tt, zz = np.meshgrid(theta, z)
    nodes = np.column_stack([radius * np.cos(tt.ravel()), radius * np.sin(tt.ravel()), zz.ravel()])

    def idx(i, j):
        return i * m + (j % m)

    tris = []
    for i in range(n):
        for j in range(m):
            a, b, c, d = idx(i, j), idx(i, j + 1), idx(i + 1, j + 1), idx(i + 1, j)
            if (i + j) % 2 == 0:
                tris += [(a, b, c), (a, c, d)]
            else:
                tris += [(a, b, d), (b, c, d)]
    tris = np.array(tris)
    if geometry_order == 1:
        return SurfaceMesh(nodes, tris, 1)

    def project(p):
        r = np.hypot(p[:, 0], p[:, 1])
        out = p.copy()
        out[:, :2] *= (radius / r)[:, None]
        return out

    return make_quadratic(nodes, tris, project)


_OCTAHEDRON = (
    np.array([[1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], float),
    np.array([[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4],
              [1, 0, 5], [2, 1, 5], [3, 2, 5], [0, 3, 5]]),
)


def _spheroid_projector(r_max, r_min):
    def project(p):
        s = np.sqrt((p[:, 0] ** 2 + p[:, 1] ** 2) / r_max ** 2 + p[:, 2] ** 2 / r_min ** 2)
        return p / s[:, None]
    return project


def generate_spheroid(r_max, r_min, refinement, geometry_order=2):
    """Closed oblate spheroid from a recursively subdivided octahedron.

    Each refinement splits every triangle into four; new vertices are
    scaled radially onto ``(x^2 + y^2)/r_max^2 + z^2/r_min^2 = 1``.
    The mesh is symmetric with respect to the three coordinate planes.
    """
    _check_positive(r_max=r_max, r_min=r_min)
    _check_order(geometry_order)
    if r_min > r_max:
        raise ParameterError("need r_max >= r_min")
    k = int(refinement)
    if k < 0:
        raise ParameterError("refinement must be >= 0")
    project = _spheroid_projector(r_max, r_min)
    nodes, tris = _OCTAHEDRON
    nodes = project(nodes)
    for _ in range(k):
        edges, tri_edges = edge_table(tris)
        mid = project(0.5 * (nodes[edges[:, 0]] + nodes[edges[:, 1]]))
        e = len(nodes) + tri_edges  # midside of edges (1,2), (2,0), (0,1)
        v0, v1, v2 = tris.T
        m12, m20, m01 = e.T
        tris = np.concatenate([
            np.column_stack([v0, m01, m20]),
            np.column_stack([v1, m12, m01]),
            np.column_stack([v2, m20, m12]),
            np.column_stack([m01, m12, m20]),
        ])
        nodes = np.vstack([nodes, mid])
    if geometry_order == 1:
        return SurfaceMesh(nodes, tris, 1)
    return make_quadratic(nodes, tris, project)


def generate_disk(radius, rings, sectors=6, geometry_order=1):
    """Flat disk in the z = 0 plane, used for planar checks."""
    _check_positive(radius=radius)
    _check_order(geometry_order)
    nodes = [(0.0, 0.0, 0.0)]
    ring_start = [0]
    for r in range(1, rings + 1):
        ring_start.append(len(nodes))
        count = sectors * r
        for j in range(count):
            t = 2 * np.pi * j / count
            nodes.append((radius * r / rings * np.cos(t), radius * r / rings * np.sin(t), 0.0))
    tris = []
    for r in range(1, rings + 1):
        inner, outer = ring_start[r - 1], ring_start[r]
        n_in, n_out = max(sectors * (r - 1), 1), sectors * r
        for s in range(sectors):
            for j in range(r):
                o = s * r + j
                i = s * (r - 1) + j
                o0, o1 = outer + o, outer + (o + 1) % n_out
                i0 = inner + (i % n_in if r > 1 else 0)
                tris.append((i0, o0, o1))
                if j < r - 1:
                    i1 = inner + (i + 1) % n_in
                    tris.append((i0, o1, i1))
    nodes = np.array(nodes)
    tris = np.array(tris)
    if geometry_order == 1:
        return SurfaceMesh(nodes, tris, 1)

    return make_quadratic(nodes, tris)

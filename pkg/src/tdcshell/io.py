"""Mesh files: OFF (ASCII) input/output and legacy VTK output.

P1 meshes are plain OFF. Quadratic meshes start with the header ``OFF P2``
and every face line lists six indices (vertices, then the midside nodes
of edges (1, 2), (2, 0), (0, 1)). Coordinates are written with ``repr``
so a write/read round trip is bit-exact.
"""
from pathlib import Path

import numpy as np

from .errors import MeshParseError, UnsupportedElementError
from .mesh import SurfaceMesh

P2_TAG = "P2"
_VTK_ORDER = {1: [0, 1, 2], 2: [0, 1, 2, 5, 3, 4]}  # VTK quadratic triangle: edges 01, 12, 20
_VTK_TYPE = {1: 5, 2: 22}


def _tokens(text):
    """Yield (line_number, tokens) for non-empty, non-comment lines."""
    for k, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield k, line.split()


def parse_off(text):
    lines = _tokens(text)
    try:
        k, head = next(lines)
    except StopIteration:
        raise MeshParseError("empty OFF file", line=1) from None
    if head[0] != "OFF":
        raise MeshParseError(f"expected 'OFF' header, got {head[0]!r}", line=k)
    if len(head) > 2 or (len(head) == 2 and head[1] != P2_TAG):
        raise MeshParseError(f"unknown OFF header tag {' '.join(head[1:])!r}", line=k)
    order = 2 if len(head) == 2 else 1
    per_face = 3 if order == 1 else 6
    try:
        k, counts = next(lines)
    except StopIteration:
        raise MeshParseError("missing count line", line=k + 1) from None
    try:
        nv, nf = int(counts[0]), int(counts[1])
    except (ValueError, IndexError):
        raise MeshParseError("count line needs integer vertex and face counts", line=k) from None
    if nv < 0 or nf < 0:
        raise MeshParseError("negative counts", line=k)

    nodes = np.empty((nv, 3))
    for i in range(nv):
        try:
            k, tok = next(lines)
        except StopIteration:
            raise MeshParseError(f"file ends after {i} of {nv} vertices", line=k + 1) from None
        if len(tok) != 3:
            raise MeshParseError(f"vertex line needs 3 coordinates, got {len(tok)}", line=k)
        try:
            nodes[i] = [float(t) for t in tok]
        except ValueError:
            raise MeshParseError("non-numeric vertex coordinate", line=k) from None

    faces = np.empty((nf, per_face), dtype=np.int64)
    for i in range(nf):
        try:
            k, tok = next(lines)
        except StopIteration:
            raise MeshParseError(f"file ends after {i} of {nf} faces", line=k + 1) from None
        try:
            vals = [int(t) for t in tok]
        except ValueError:
            raise MeshParseError("non-integer face entry", line=k) from None
        if vals[0] != per_face:
            raise UnsupportedElementError(
                f"face with {vals[0]} nodes; only {per_face}-node triangles are supported here",
                line=k)
        if len(vals) != per_face + 1:
            raise MeshParseError(f"face line needs {per_face} indices", line=k)
        idx = vals[1:]
        if min(idx) < 0 or max(idx) >= nv:
            raise MeshParseError("face index out of range", line=k)
        faces[i] = idx

    extra = next(lines, None)
    if extra is not None:
        raise MeshParseError("unexpected data after the last face", line=extra[0])
    return SurfaceMesh(nodes, faces, order)


def read_off(path):
    return parse_off(Path(path).read_text())


def format_off(mesh):
    out = ["OFF" if mesh.geometry_order == 1 else f"OFF {P2_TAG}",
           f"{mesh.n_nodes} {mesh.n_elements} 0"]
    out += [f"{x!r} {y!r} {z!r}" for x, y, z in mesh.nodes.tolist()]
    n = mesh.elements.shape[1]
    out += [f"{n} " + " ".join(map(str, e)) for e in mesh.elements.tolist()]
    return "\n".join(out) + "\n"


def write_off(mesh, path):
    Path(path).write_text(format_off(mesh))


def format_vtk(mesh, nodal_fields=None, title="tdcshell output"):
    """Legacy ASCII unstructured grid with point-data vectors and scalars."""
    order = mesh.geometry_order
    nn, ne = mesh.n_nodes, mesh.n_elements
    npe = 3 if order == 1 else 6
    out = ["# vtk DataFile Version 3.0", title.replace("\n", " ")[:255], "ASCII",
           "DATASET UNSTRUCTURED_GRID", f"POINTS {nn} double"]
    out += [f"{x!r} {y!r} {z!r}" for x, y, z in mesh.nodes.tolist()]
    cells = mesh.elements[:, _VTK_ORDER[order]]
    out.append(f"CELLS {ne} {ne * (npe + 1)}")
    out += [f"{npe} " + " ".join(map(str, c)) for c in cells.tolist()]
    out.append(f"CELL_TYPES {ne}")
    out += [str(_VTK_TYPE[order])] * ne
    fields = dict(nodal_fields or {})
    if fields:
        out.append(f"POINT_DATA {nn}")
    for name, values in fields.items():
        v = np.asarray(values, dtype=float)
        if v.shape[0] != nn:
            raise ValueError(f"field {name!r} has {v.shape[0]} values for {nn} nodes")
        key = str(name).replace(" ", "_")
        if v.ndim == 2 and v.shape[1] == 3:
            out.append(f"VECTORS {key} double")
            out += [f"{a!r} {b!r} {c!r}" for a, b, c in v.tolist()]
        elif v.ndim == 1:
            out += [f"SCALARS {key} double 1", "LOOKUP_TABLE default"]
            out += [repr(a) for a in v.tolist()]
        else:
            raise ValueError(f"field {name!r} must be (n,) or (n, 3)")
    return "\n".join(out) + "\n"


def write_vtk(mesh, nodal_fields, path, title="tdcshell output"):
    Path(path).write_text(format_vtk(mesh, nodal_fields, title))

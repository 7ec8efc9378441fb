import re

import numpy as np
import pytest

from tdcshell.errors import MeshParseError, UnsupportedElementError
from tdcshell.io import format_off, format_vtk, parse_off, read_off, write_off, write_vtk
from tdcshell.mesh import generate_cylinder, generate_spheroid

TRI = """OFF
# a comment
3 1 0
0 0 0
1 0 0   # trailing comment
0 1 0
3 0 1 2
"""


def test_parse_minimal_triangle():
    mesh = parse_off(TRI)
    assert mesh.geometry_order == 1
    assert mesh.n_nodes == 3 and mesh.n_elements == 1
    np.testing.assert_array_equal(mesh.elements, [[0, 1, 2]])


@pytest.mark.parametrize("order", [1, 2])
def test_off_round_trip_is_bit_exact(order, tmp_path):
    mesh = generate_cylinder(0.5, 0.6, 3, 7, order)
    path = tmp_path / "m.off"
    write_off(mesh, path)
    back = read_off(path)
    assert back.geometry_order == order
    assert np.array_equal(back.nodes, mesh.nodes)
    assert np.array_equal(back.elements, mesh.elements)
    assert np.array_equal(back.boundary, mesh.boundary)
    assert format_off(back) == path.read_text()


def test_quadratic_header_tag():
    text = format_off(generate_spheroid(1.0, 0.5, 1, 2))
    assert text.startswith("OFF P2\n")
    face = text.strip().splitlines()[-1].split()
    assert face[0] == "6" and len(face) == 7


@pytest.mark.parametrize("text,line,pattern", [
    ("", 1, "empty"),
    ("PLY\n3 1 0\n", 1, "header"),
    ("OFF\n3 x 0\n", 2, "integer"),
    ("OFF\n3 1 0\n0 0 0\n1 0\n0 1 0\n3 0 1 2\n", 4, "3 coordinates"),
    ("OFF\n3 1 0\n0 0 0\n1 0 a\n0 1 0\n3 0 1 2\n", 4, "non-numeric"),
    ("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 5\n", 6, "out of range"),
    ("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n", 6, "ends"),
    ("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n1 2 3\n", 7, "unexpected"),
])
def test_parse_errors_report_line(text, line, pattern):
    with pytest.raises(MeshParseError) as info:
        parse_off(text)
    assert info.value.line == line
    assert re.search(pattern, str(info.value))


def test_quad_faces_are_rejected():
    text = "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n"
    with pytest.raises(UnsupportedElementError) as info:
        parse_off(text)
    assert info.value.line == 7


def test_missing_file_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        read_off(tmp_path / "nope.off")


def _parse_vtk(text):
    lines = text.splitlines()
    assert lines[0].startswith("# vtk DataFile Version")
    assert lines[2] == "ASCII" and lines[3] == "DATASET UNSTRUCTURED_GRID"
    k = 4
    kw, n, dtype = lines[k].split()
    assert kw == "POINTS" and dtype == "double"
    n = int(n)
    pts = np.array([[float(v) for v in l.split()] for l in lines[k + 1:k + 1 + n]])
    k += 1 + n
    kw, nc, size = lines[k].split()
    nc, size = int(nc), int(size)
    cells = [list(map(int, l.split())) for l in lines[k + 1:k + 1 + nc]]
    assert sum(len(c) for c in cells) == size
    k += 1 + nc
    assert lines[k] == f"CELL_TYPES {nc}"
    types = [int(l) for l in lines[k + 1:k + 1 + nc]]
    k += 1 + nc
    fields = {}
    if k < len(lines):
        assert lines[k] == f"POINT_DATA {n}"
        k += 1
        while k < len(lines):
            head = lines[k].split()
            if head[0] == "VECTORS":
                fields[head[1]] = np.array([[float(v) for v in l.split()]
                                            for l in lines[k + 1:k + 1 + n]])
                k += 1 + n
            else:
                assert head[0] == "SCALARS" and lines[k + 1] == "LOOKUP_TABLE default"
                fields[head[1]] = np.array([float(l) for l in lines[k + 2:k + 2 + n]])
                k += 2 + n
    return pts, cells, types, fields


@pytest.mark.parametrize("order,ctype", [(1, 5), (2, 22)])
def test_vtk_grammar_and_node_order(order, ctype, tmp_path):
    mesh = generate_cylinder(0.5, 0.6, 2, 5, order)
    disp = np.arange(mesh.n_nodes * 3, dtype=float).reshape(-1, 3)
    path = tmp_path / "out.vtk"
    write_vtk(mesh, {"displacement": disp, "radius": np.ones(mesh.n_nodes)}, path)
    pts, cells, types, fields = _parse_vtk(path.read_text())
    assert np.array_equal(pts, mesh.nodes)
    assert set(types) == {ctype}
    np.testing.assert_array_equal(fields["displacement"], disp)
    np.testing.assert_array_equal(fields["radius"], 1.0)
    if order == 2:
        # VTK expects midsides of edges 01, 12, 20 after the vertices
        for c in cells:
            e = mesh.elements[[i for i, el in enumerate(mesh.elements)
                               if list(el[:3]) == c[1:4]][0]]
            assert c[4:] == [e[5], e[3], e[4]]


def test_vtk_rejects_bad_fields():
    mesh = generate_cylinder(0.5, 0.6, 1, 3, 1)
    with pytest.raises(ValueError):
        format_vtk(mesh, {"u": np.zeros((2, 3))})
    with pytest.raises(ValueError):
        format_vtk(mesh, {"u": np.zeros((mesh.n_nodes, 2))})

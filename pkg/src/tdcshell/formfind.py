"""Minimal-surface form finding by repeated Laplace-Beltrami solves.

Each outer iteration solves, on the current discrete surface, for nodal
positions ``x`` with ``int grad_G x : grad_G v dG = 0`` for all ``v``
vanishing on the boundary, boundary positions held fixed, and then moves
the surface to ``x``. A fixed point is a discrete surface that is
stationary for its own area.
"""
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy import linalg, optimize

from .errors import (DegenerateMeshError, IllPosedError, NonConvergenceError,
                     SingularMatrixError, TdcError)
from .solver import factorize
from .space import FESpace


def scalar_stiffness(space):
    """Sparse ``A[a, b] = int grad phi_a . grad phi_b dG`` on the DOF nodes."""
    fr = space.frames
    wg = fr.grads * fr.weight[..., None, None]
    Ke = np.matmul(wg, np.swapaxes(fr.grads, -1, -2)).sum(axis=1)
    c = space.cells
    n = c.shape[1]
    rows = np.repeat(c, n, axis=1).ravel()
    cols = np.tile(c, (1, n)).ravel()
    N = space.n_dof_nodes
    return sp.coo_matrix((Ke.ravel(), (rows, cols)), shape=(N, N)).tocsr()


def discrete_area(mesh):
    """Sum of quadrature area weights over all elements."""
    return FESpace(mesh, 1).area()


def element_quality(mesh):
    """``4 sqrt(3) A / sum(l^2)`` of the vertex triangles (1 for equilateral)."""
    X = mesh.nodes[mesh.triangles]
    e0, e1, e2 = X[:, 1] - X[:, 0], X[:, 2] - X[:, 1], X[:, 0] - X[:, 2]
    area = 0.5 * np.linalg.norm(np.cross(e0, -e2), axis=1)
    l2 = (e0 ** 2).sum(1) + (e1 ** 2).sum(1) + (e2 ** 2).sum(1)
    return 4 * np.sqrt(3) * area / l2


def _solve_positions(mesh, displacement_degree):
    space = FESpace(mesh, displacement_degree)
    fixed = space.boundary
    if not fixed.any():
        raise IllPosedError("form finding needs fixed boundary nodes")
    free = ~fixed
    A = scalar_stiffness(space)
    x = space.dof_coordinates().copy()
    if free.any():
        Aff = A[free][:, free]
        rhs = -(A[free][:, fixed] @ x[fixed])
        try:
            lu = factorize(Aff)
        except SingularMatrixError as exc:
            raise DegenerateMeshError(f"singular Laplace-Beltrami matrix: {exc}") from exc
        xf = lu.solve(rhs)
        if not np.all(np.isfinite(xf)):
            raise DegenerateMeshError("singular Laplace-Beltrami matrix")
        x[free] = xf
    return space, x


def laplace_beltrami_step(mesh, displacement_degree=None):
    """One fixed-point update of the nodal positions.

    With ``displacement_degree`` equal to the geometry order (default) all
    geometry nodes, midside nodes included, are unknowns. With P1 on a P2
    mesh only the vertices are solved for; the new surface is the one
    spanned by the P1 position field: midside nodes land on the chords,
    boundary ones included, while boundary vertices never move.
    """
    space, x = _solve_positions(mesh, displacement_degree)
    return _moved(mesh, space, x)


def _moved(mesh, space, x):
    # the new surface is the image of the old one under the position field
    return mesh.with_nodes(space.to_mesh_nodes(x))


@dataclass
class FormFindState:
    mesh: object
    iteration: int = 0
    areas: list = field(default_factory=list)  # area before iteration 1, then after each
    movements: list = field(default_factory=list)  # max nodal movement per iteration (m)
    min_quality: list = field(default_factory=list)
    converged: bool = False
    pinching: bool = False

    def to_csv(self):
        lines = ["iteration,area_m2,max_movement_m,min_quality"]
        lines.append(f"0,{self.areas[0]:.16e},,{self.min_quality[0]:.6f}")
        for k, (a, d) in enumerate(zip(self.areas[1:], self.movements), start=1):
            lines.append(f"{k},{a:.16e},{d:.6e},{self.min_quality[k]:.6f}")
        return "\n".join(lines) + "\n"


class _Stop(Exception):
    pass


def form_find(mesh, movement_tol=None, max_outer=500, displacement_degree=None,
              callback=None, pinch_quality=0.02, raise_on_failure=False,
              acceleration=None, anderson_depth=5):
    """Iterate ``laplace_beltrami_step`` until nodes stop moving.

    ``movement_tol`` defaults to ``1e-10`` times the bounding-box
    diagonal. ``acceleration=None`` (default) runs the plain fixed-point
    iteration, whose area history never increases. ``"anderson"`` applies
    Anderson mixing to the same map; it removes the slow tangential drift
    of the plain scheme but gives up area monotonicity. Either way an
    iterate counts as converged only when one plain step moves no node by
    more than ``movement_tol``.

    Returns ``(mesh, state)``; without convergence the last surface is
    returned with ``converged = False`` (``pinching`` is set when the
    minimum element quality fell below ``pinch_quality``) unless
    ``raise_on_failure`` is true.
    """
    if acceleration not in (None, "none", "anderson"):
        raise ValueError(f"unknown acceleration {acceleration!r}")
    if movement_tol is None:
        movement_tol = 1e-10 * mesh.bounding_box_diagonal()
    state = FormFindState(mesh, areas=[discrete_area(mesh)],
                          min_quality=[float(element_quality(mesh).min())])

    def record(new, move):
        state.iteration += 1
        state.mesh = new
        state.movements.append(move)
        state.areas.append(discrete_area(new))
        q = float(element_quality(new).min())
        state.min_quality.append(q)
        if callback is not None:
            callback(state.iteration, new, state)
        if move <= movement_tol:
            state.converged = True
        elif q < pinch_quality:
            state.pinching = True
        return state.converged or state.pinching

    def plain(current, budget):
        for _ in range(budget):
            new = laplace_beltrami_step(current, displacement_degree)
            move = float(np.linalg.norm(new.nodes - current.nodes, axis=1).max())
            current = new
            if record(current, move):
                break
        return current

    if acceleration in (None, "none"):
        current = plain(mesh, max_outer)
    else:
        # one plain step fixes the discrete surface family (chord midsides for P1 on P2)
        current = plain(mesh, 1)
        if not (state.converged or state.pinching):
            current = _anderson(current, displacement_degree, max_outer - 1, anderson_depth,
                                record, plain)
    state.mesh = current
    if not state.converged and raise_on_failure:
        raise NonConvergenceError(
            f"form finding stopped after {state.iteration} iterations"
            + (" (mesh pinching)" if state.pinching else ""), state)
    return current, state


def _anderson(template, displacement_degree, budget, depth, record, plain):
    space0 = FESpace(template, displacement_degree)

    def to_mesh(x):
        return _moved(template, space0, x.reshape(-1, 3))

    best = {"mesh": template, "move": np.inf}
    calls = [0]

    def residual(x):
        if calls[0] >= budget:
            raise _Stop
        calls[0] += 1
        current = to_mesh(x)
        _, y = _solve_positions(current, displacement_degree)
        d = y - x.reshape(-1, 3)
        move = float(np.linalg.norm(d, axis=1).max())
        if move < best["move"]:
            best.update(mesh=current, move=move)
        if record(current, move):
            best.update(mesh=current, move=-1.0)
            raise _Stop
        return d.ravel()

    try:
        with warnings.catch_warnings():
            # near a fixed point the mixing history is nearly collinear
            warnings.simplefilter("ignore", linalg.LinAlgWarning)
            optimize.anderson(residual, space0.dof_coordinates().ravel(), alpha=1.0, M=depth,
                              line_search=None, maxiter=budget + 1, f_tol=1e-300)
    except (_Stop, optimize.NoConvergence):
        pass
    except TdcError:
        # a mixed iterate left the admissible set: carry on plainly from the best one
        if budget - calls[0] > 0:
            return plain(best["mesh"], budget - calls[0])
    return best["mesh"]

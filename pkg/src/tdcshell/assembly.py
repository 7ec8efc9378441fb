"""Element and global assembly of the membrane equations.

Internal virtual work per element::

    f[a, i] = sum_q t w_q P_G[i, J] dphi_a[J]
    K[a i, b k] = sum_q t w_q dphi_a[J] L_G[i, J, k, L] dphi_b[L]

with ``P_G``, ``L_G`` from the plane-stress condensation at the surface
deformation gradient ``F_G = I + sum_a u_a (x) dphi_a``.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import TdcError
from .plane_stress import solve_director

CHUNK = 4096  # elements per vectorised batch


@dataclass
class Dirichlet:
    """Prescribed values on a set of global DOFs."""

    dofs: np.ndarray
    values: np.ndarray = None

    def __post_init__(self):
        self.dofs = np.asarray(self.dofs, dtype=np.int64)
        if self.values is None:
            self.values = np.zeros(len(self.dofs))
        self.values = np.broadcast_to(np.asarray(self.values, float), self.dofs.shape).copy()

    def mask(self, n_dofs):
        m = np.zeros(n_dofs, dtype=bool)
        m[self.dofs] = True
        return m

    def apply(self, u):
        u = np.array(u, dtype=float).ravel()
        u[self.dofs] = self.values
        return u

    @classmethod
    def empty(cls):
        return cls(np.zeros(0, dtype=np.int64))


def clamp_nodes(space, node_mask, components=(0, 1, 2), values=None):
    """Dirichlet data on the DOF nodes selected by ``node_mask`` (per DOF node)."""
    nodes = np.nonzero(np.asarray(node_mask))[0]
    comps = np.asarray(components)
    dofs = (3 * nodes[:, None] + comps[None, :]).ravel()
    if values is not None:
        values = np.asarray(values, dtype=float).reshape(-1, 3)[nodes][:, comps].ravel()
    return Dirichlet(dofs, values)


def surface_deformation_gradient(grads, u_cells):
    """``I + sum_a u_a (x) grad phi_a`` for (ne, nq) points."""
    return np.eye(3) + np.einsum("eai,eqaj->eqij", u_cells, grads)


class DirectorField:
    """Per-quadrature-point director storage used to warm start the local solves."""

    def __init__(self, space):
        ne, nq = space.frames.weight.shape
        self.values = np.zeros((ne, nq, 3))

    def copy(self):
        other = object.__new__(DirectorField)
        other.values = self.values.copy()
        return other


@dataclass
class InternalResult:
    force: np.ndarray  # (n_dofs,)
    stiffness: sp.csr_matrix
    energy: float
    directors: np.ndarray  # (ne, nq, 3)
    F: np.ndarray  # (ne, nq, 3, 3) full deformation gradient
    stress: np.ndarray  # (ne, nq, 3, 3)
    local_iterations: int
    plane_stress_residual: float


def _element_kernel(grads, weight, normal, u_cells, material, warm, with_tangent, tol):
    Fs = surface_deformation_gradient(grads, u_cells)
    state = solve_director(Fs, normal, material, warm_start=warm, tol=tol,
                           with_tangent=with_tangent)
    t = material.thickness
    tw = t * weight
    fe = np.einsum("eq,eqij,eqaj->eai", tw, state.stress, grads)
    Ke = None
    if with_tangent:
        tmp = np.einsum("eqijkl,eqbl->eqijkb", state.tangent, grads)
        Ke = np.einsum("eq,eqaj,eqijkb->eaibk", tw, grads, tmp)
    energy = float(np.sum(tw * material.psi(state.F)))
    return fe, Ke, state, energy


def element_internal(space, element, nodal_u, material, directors=None, tol=None):
    """Force vector (3 n_shape,) and stiffness (3 n_shape, 3 n_shape) of one element.

    DOFs are ordered node-major (``3 * a + i``).
    """
    u = np.asarray(nodal_u, float).reshape(-1, 3)
    fs = space.frames[[element]]
    warm = None if directors is None else np.asarray(directors)[[element]]
    fe, Ke, _, _ = _element_kernel(fs.grads, fs.weight, fs.normal, u[space.cells[[element]]],
                                   material, warm, True, tol)
    n = 3 * space.n_shape
    return fe.reshape(n), Ke.reshape(n, n)


class SparsityPattern:
    """COO index arrays for scattering element matrices, cached per space."""

    def __init__(self, space):
        dofs = space.cell_dofs()
        n = dofs.shape[1]
        self.rows = np.repeat(dofs, n, axis=1).ravel()
        self.cols = np.tile(dofs, (1, n)).ravel()
        self.dofs = dofs
        self.n = space.n_dofs


def _pattern(space):
    pat = getattr(space, "_sparsity", None)
    if pat is None:
        pat = SparsityPattern(space)
        space._sparsity = pat
    return pat


def internal_forces(space, material, u, directors=None, with_tangent=True, tol=None,
                    chunk=CHUNK):
    """Assemble internal force, tangent stiffness and strain energy.

    ``directors`` (a ``DirectorField``) is read as warm start and updated
    in place with the converged directors.
    """
    u = np.asarray(u, float).reshape(-1, 3)
    fr = space.frames
    ne, nq = fr.weight.shape
    ns = space.n_shape
    pat = _pattern(space)
    force = np.zeros(space.n_dofs)
    Kdata = np.empty((ne, 3 * ns, 3 * ns)) if with_tangent else None
    d_out = np.empty((ne, nq, 3))
    F_out = np.empty((ne, nq, 3, 3))
    P_out = np.empty((ne, nq, 3, 3))
    energy = 0.0
    iters = 0
    resid = 0.0
    for s in range(0, ne, chunk):
        sl = slice(s, min(s + chunk, ne))
        warm = None if directors is None else directors.values[sl]
        try:
            fe, Ke, state, en = _element_kernel(
                fr.grads[sl], fr.weight[sl], fr.normal[sl], u[space.cells[sl]],
                material, warm, with_tangent, tol)
        except TdcError as exc:
            raise type(exc)(f"elements {sl.start}..{sl.stop - 1}: {exc}") from exc
        force += np.bincount(pat.dofs[sl].ravel(), weights=fe.reshape(-1),
                             minlength=space.n_dofs)
        if with_tangent:
            Kdata[sl] = Ke.reshape(len(Ke), 3 * ns, 3 * ns)
        d_out[sl] = state.director
        F_out[sl] = state.F
        P_out[sl] = state.stress
        energy += en
        iters = max(iters, state.iterations)
        resid = max(resid, state.residual)
    if directors is not None:
        directors.values[...] = d_out
    K = None
    if with_tangent:
        K = sp.coo_matrix((Kdata.ravel(), (pat.rows, pat.cols)),
                          shape=(space.n_dofs, space.n_dofs)).tocsr()
    return InternalResult(force, K, energy, d_out, F_out, P_out, iters, resid)


# loads ---------------------------------------------------------------------

def _scatter_vector(space, fe):
    return np.bincount(space.cell_dofs().ravel(), weights=np.asarray(fe).reshape(-1),
                       minlength=space.n_dofs)


@dataclass
class ConservativeLoad:
    """Dead load ``l(v) = int g(X) N . v dG`` on the reference surface.

    ``magnitude`` maps reference points (..., 3) to scalars.
    """

    magnitude: object
    conservative = True

    def vector(self, space, F=None):
        fr = space.frames
        g = np.asarray(self.magnitude(fr.points), float)
        fe = np.einsum("eq,eq,qa,eqi->eai", g, fr.weight, fr.phi, fr.normal)
        return _scatter_vector(space, fe)

    def potential(self, space, u):
        return float(self.vector(space) @ np.asarray(u).ravel())


def load_conservative(space, magnitude):
    return ConservativeLoad(magnitude).vector(space)


@dataclass
class PressureLoad:
    """Follower pressure ``int p cof(F) N . v dG`` (outward positive).

    The deformed area vector is taken from the full 3-D deformation
    gradient including the director, so it tracks thickness-plane stretch
    and the current normal.
    """

    pressure: float
    conservative = False

    def vector(self, space, F=None):
        fr = space.frames
        if F is None:
            area_vec = fr.normal
        else:
            det = np.linalg.det(F)
            if np.any(~(det > 0)):
                raise TdcError("pressure load: inverted material point")
            FinvT_N = np.linalg.solve(np.swapaxes(F, -1, -2), fr.normal[..., None])[..., 0]
            area_vec = det[..., None] * FinvT_N
        fe = self.pressure * np.einsum("eq,qa,eqi->eai", fr.weight, fr.phi, area_vec)
        return _scatter_vector(space, fe)

    def potential(self, space, u):
        return 0.0


def load_pressure(space, F, pressure):
    return PressureLoad(pressure).vector(space, F)


@dataclass
class NodalLoad:
    """Fixed nodal force vector (n_dofs,)."""

    values: np.ndarray
    conservative = True

    def vector(self, space, F=None):
        return np.asarray(self.values, float).ravel()

    def potential(self, space, u):
        return float(self.vector(space) @ np.asarray(u).ravel())


# global system --------------------------------------------------------------

@dataclass
class GlobalSystem:
    residual: np.ndarray  # internal - external on free DOFs, zero on fixed DOFs
    tangent: sp.csr_matrix  # Dirichlet rows/cols eliminated, unit diagonal
    dirichlet_mask: np.ndarray
    internal: np.ndarray = None
    external: np.ndarray = None
    energy: float = 0.0
    result: InternalResult = field(default=None, repr=False)


def eliminate(K, mask):
    """Symmetric row/column elimination with unit diagonal on masked DOFs."""
    free = sp.diags((~mask).astype(float))
    return (free @ K @ free + sp.diags(mask.astype(float))).tocsr()


def external_forces(space, loads, F=None, scale=1.0):
    ext = np.zeros(space.n_dofs)
    for load in loads:
        ext += load.vector(space, F)
    return scale * ext


def assemble(space, material, u, loads=(), dirichlet=None, directors=None, scale=1.0,
             tol=None, with_tangent=True):
    """Residual ``f_int - scale * f_ext`` and eliminated tangent at ``u``."""
    n = space.n_dofs
    mask = np.zeros(n, dtype=bool) if dirichlet is None else dirichlet.mask(n)
    res = internal_forces(space, material, u, directors, with_tangent=with_tangent, tol=tol)
    ext = external_forces(space, loads, res.F, scale)
    r = res.force - ext
    r[mask] = 0.0
    K = eliminate(res.stiffness, mask) if with_tangent else None
    pot = scale * sum(ld.potential(space, u) for ld in loads)
    return GlobalSystem(r, K, mask, res.force, ext, res.energy - pot, res)

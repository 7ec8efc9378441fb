"""Implicit plane stress: local director solve and static condensation.

For a surface deformation gradient ``Fs`` and unit normal ``N`` the
director ``d`` is found such that ``P(Fs + d (x) N) . N = 0``. Newton
updates solve ``L_NN . dd = -P . N`` with ``L_NN[i, k] = N_J L[i, J, k, L] N_L``.
The consistent tangent of ``Fs -> P`` is the Schur complement

    L_G = L - (L . N) L_NN^{-1} (N . L)

All routines are vectorised over leading axes.
"""
from dataclasses import dataclass

import numpy as np

from .errors import CondensationSingularityError, InvertedElementError, LocalDivergenceError

MAX_HALVINGS = 10


@dataclass
class PlaneStressState:
    director: np.ndarray  # (..., 3)
    F: np.ndarray  # (..., 3, 3) full deformation gradient
    stress: np.ndarray  # (..., 3, 3) P at the converged director
    material_tangent: np.ndarray = None  # (..., 3, 3, 3, 3)
    tangent: np.ndarray = None  # condensed, (..., 3, 3, 3, 3)
    iterations: int = 0
    residual: float = 0.0  # max |P . N| over all points


def normal_block(L, N):
    """``L_NN``, ``L . N`` (..., 3, 3, 3) and ``N . L`` (..., 3, 3, 3)."""
    LdotN = np.einsum("...ijkl,...l->...ijk", L, N)
    NdotL = np.einsum("...j,...ijkl->...ikl", N, L)
    LNN = np.einsum("...ijk,...j->...ik", LdotN, N)
    return LNN, LdotN, NdotL


def _check_block(LNN):
    scale = np.abs(LNN).max(axis=(-1, -2))
    det = np.linalg.det(LNN)
    bad = ~(np.abs(det) > 1e-13 * scale ** 3)
    if bad.any():
        raise CondensationSingularityError(
            f"singular normal-normal tangent block at {int(bad.sum())} point(s)")


def _aligned_guess(Fs, N):
    # director making F.N the unit normal of the deformed tangent plane
    ref = np.where(np.abs(N[:, :1]) < 0.9, np.array([1.0, 0, 0]), np.array([0, 1.0, 0]))
    t1 = np.cross(N, ref)
    t1 /= np.linalg.norm(t1, axis=-1, keepdims=True)
    t2 = np.cross(N, t1)
    c = np.cross(np.einsum("mij,mj->mi", Fs, t1), np.einsum("mij,mj->mi", Fs, t2))
    with np.errstate(invalid="ignore", divide="ignore"):
        c /= np.linalg.norm(c, axis=-1, keepdims=True)
    return c - np.einsum("mij,mj->mi", Fs, N)


def solve_director(F_surf, normal, material, warm_start=None, tol=None, max_iter=30,
                   with_tangent=True):
    """Solve the plane-stress director problem at every point.

    Parameters
    ----------
    F_surf : (..., 3, 3) surface deformation gradient.
    normal : (..., 3) unit reference normal.
    material : ``Material``.
    warm_start : optional (..., 3) initial director; by default ``F N`` starts
        as the unit normal of the deformed tangent plane.
    tol : residual tolerance on |P . N| (default ``1e-9 * E``).

    Once a point meets ``tol`` one more Newton step is taken, which puts
    the residual at round-off level and keeps the condensed stress
    consistent for the global iteration.
    """
    shape = np.shape(F_surf)[:-2]
    Fs = np.asarray(F_surf, dtype=float).reshape(-1, 3, 3)
    N = np.broadcast_to(np.asarray(normal, dtype=float), shape + (3,)).reshape(-1, 3)
    m = len(Fs)
    if tol is None:
        tol = 1e-9 * material.E
    if warm_start is None:
        # cold start: F N along the normal of the deformed tangent plane (exact for rigid motions)
        d = _aligned_guess(Fs, N)
    else:
        d = np.array(warm_start, float).reshape(-1, 3).copy()
    F = Fs + d[:, :, None] * N[:, None, :]
    if not np.all(np.isfinite(F)):
        raise InvertedElementError("collapsed tangent plane: no admissible director")
    # round-off can leave a collapsed F with a tiny positive determinant
    scale = np.abs(F).max(axis=(-1, -2)) ** 3
    flipped = ~(np.linalg.det(F) > 1e-10 * scale)
    if flipped.any():
        d[flipped] = _aligned_guess(Fs[flipped], N[flipped])
        F = Fs + d[:, :, None] * N[:, None, :]
        if not np.all(np.isfinite(F)) or np.any(~(np.linalg.det(F) > 0)):
            raise InvertedElementError("surface deformation gradient has no admissible director")

    P = np.empty((m, 3, 3))
    active = np.arange(m)
    polished = np.zeros(m, dtype=bool)
    history = []
    iterations = 0
    rnorm = np.zeros(m)
    for it in range(max_iter + 1):
        Na = N[active]
        Pa, LNN = material.stress_normal_block(F[active], Na)
        P[active] = Pa
        r = np.einsum("mij,mj->mi", Pa, Na)
        rnorm[active] = np.linalg.norm(r, axis=-1)
        history.append(float(rnorm.max()))
        conv = rnorm[active] <= tol
        keep = ~(conv & polished[active])
        active, r, LNN, Na, conv = active[keep], r[keep], LNN[keep], Na[keep], conv[keep]
        if not len(active):
            break
        if it == max_iter:
            raise LocalDivergenceError(
                f"plane-stress iteration did not converge in {max_iter} steps "
                f"(max |P.N| = {history[-1]:.3e})", history)
        _check_block(LNN)
        step = np.linalg.solve(LNN, -r[..., None])[..., 0]
        polished[active] |= conv
        d_old = d[active]
        trial = d_old + step
        Ft = Fs[active] + trial[:, :, None] * Na[:, None, :]
        bad = ~(np.linalg.det(Ft) > 0)
        halvings = 0
        while bad.any():
            halvings += 1
            if halvings > MAX_HALVINGS:
                raise InvertedElementError(
                    f"det F <= 0 in the director iteration after {MAX_HALVINGS} step halvings")
            step[bad] *= 0.5
            trial[bad] = d_old[bad] + step[bad]
            Ft[bad] = Fs[active][bad] + trial[bad][:, :, None] * Na[bad][:, None, :]
            bad = ~(np.linalg.det(Ft) > 0)
        d[active] = trial
        F[active] = Ft
        iterations = it + 1

    state = PlaneStressState(
        director=d.reshape(shape + (3,)),
        F=F.reshape(shape + (3, 3)),
        stress=P.reshape(shape + (3, 3)),
        material_tangent=None,
        iterations=iterations,
        residual=float(rnorm.max()) if m else 0.0,
    )
    if with_tangent:
        state.material_tangent = material.tangent(F).reshape(shape + (3, 3, 3, 3))
        state.tangent = condensed_tangent(state, normal, material)
    return state


def condensed_tangent(state, normal, material=None):
    """Consistent tangent ``dP_G / dF_G`` of the implicit plane-stress map.

    Uses the material tangent stored in ``state``; ``L_NN`` is applied by a
    direct 3x3 solve against the rows of ``N . L``.
    """
    L = state.material_tangent
    N = np.broadcast_to(np.asarray(normal, dtype=float), L.shape[:-4] + (3,))
    LNN, LdotN, NdotL = normal_block(L, N)
    _check_block(LNN.reshape(-1, 3, 3))
    rhs = NdotL.reshape(NdotL.shape[:-2] + (9,))
    X = np.linalg.solve(LNN, rhs).reshape(NdotL.shape)
    return L - np.einsum("...ija,...akl->...ijkl", LdotN, X)


def current_normal(F, N):
    """``n = F^{-T} N / |F^{-T} N|``."""
    n = np.linalg.solve(np.swapaxes(F, -1, -2), np.asarray(N)[..., None])[..., 0]
    return n / np.linalg.norm(n, axis=-1, keepdims=True)

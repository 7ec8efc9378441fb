"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line with the measured
quantities; pytest repeats them in an "acceptance criteria" summary
section. Run this file directly to get the same lines without pytest.
"""
import functools
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from conftest import ACCEPTANCE_LINES, random_F, random_rotation  # noqa: E402
from tdcshell.assembly import (Dirichlet, clamp_nodes, element_internal,  # noqa: E402
                               internal_forces)
from tdcshell.config import default_config  # noqa: E402
from tdcshell.formfind import form_find, scalar_stiffness  # noqa: E402
from tdcshell.materials import make_material  # noqa: E402
from tdcshell.mesh import SurfaceMesh, generate_cylinder  # noqa: E402
from tdcshell.oracles import catenoid_reference, fd_jacobian, fit_order  # noqa: E402
from tdcshell.plane_stress import current_normal, solve_director  # noqa: E402
from tdcshell.scenarios import (build_dirichlet, build_loads, build_material,  # noqa: E402
                                build_mesh, build_space, run_convergence_study,
                                run_pressure_sweep, solver_config)
from tdcshell.solver import solve  # noqa: E402
from tdcshell.space import FESpace  # noqa: E402


def report(number, ok, text):
    line = f"{'PASS' if ok else 'FAIL'} [{number}] {text}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


# 1, 2: catenoid ---------------------------------------------------------------

CATENOID_LEVELS = [(4, 16), (8, 32), (16, 64), (32, 128)]  # (axial, circumferential)


def catenoid_study(degree, tol_factor):
    """Area errors over the refinement levels; a level counts if its area has settled."""
    _, exact, _ = catenoid_reference(0.5, 0.3)
    hs, errs, notes = [], [], []
    for axial, circ in CATENOID_LEVELS:
        mesh = generate_cylinder(0.5, 0.6, axial, circ, 2)
        tol = None if tol_factor is None else tol_factor * mesh.bounding_box_diagonal()
        _, state = form_find(mesh, movement_tol=tol, max_outer=500,
                             displacement_degree=degree, acceleration="anderson")
        err = abs(state.areas[-1] - exact)
        drift = abs(state.areas[-1] - state.areas[-min(50, len(state.areas))])
        settled = state.converged or drift <= 1e-3 * err
        notes.append(f"{circ}x{axial}: {state.iteration} it, err {err:.3e}"
                     + ("" if state.converged else f" (area drift {drift:.1e})"))
        assert settled, f"level {circ}x{axial} did not settle: {notes[-1]}"
        hs.append(mesh.max_edge_length())
        errs.append(err)
    return fit_order(hs, errs), notes


def test_criterion_1_catenoid_superparametric_order_two():
    t0 = time.perf_counter()
    fit, notes = catenoid_study(1, None)
    dt = time.perf_counter() - t0
    ok = abs(fit.order - 2.0) <= 0.25 and dt < 120
    report(1, ok, f"catenoid P1 on P2: fitted order {fit.order:.3f} (2.0 +- 0.25), "
                  f"{dt:.1f} s (< 120 s); " + "; ".join(notes))
    assert ok


def test_criterion_2_catenoid_isoparametric_order_four():
    t0 = time.perf_counter()
    # iso-P2 iterates keep drifting tangentially at ~1e-9 of the diagonal while the area is fixed
    fit, notes = catenoid_study(2, 1e-9)
    dt = time.perf_counter() - t0
    ok = abs(fit.order - 4.0) <= 0.5
    report(2, ok, f"catenoid iso-P2: fitted order {fit.order:.3f} (4.0 +- 0.5), {dt:.1f} s; "
                  + "; ".join(notes))
    assert ok


# 3, 4: conservative cylinder ----------------------------------------------------

@functools.lru_cache(maxsize=None)
def cylinder_study():
    cfg = default_config("solve-cylinder-load")
    t0 = time.perf_counter()
    table = run_convergence_study(cfg, levels=4)
    return table, time.perf_counter() - t0


@pytest.mark.slow
def test_criterion_3_cylinder_displacement_order_two():
    table, dt = cylinder_study()
    fn = table.fits["normal_error_m2"]
    ft = table.fits["tangential_error_m2"]
    ok = abs(fn.order - 2.0) <= 0.3 and abs(ft.order - 2.0) <= 0.3 and dt < 600
    report(3, ok, f"cylinder load: normal order {fn.order:.3f}, tangential order {ft.order:.3f} "
                  f"(2.0 +- 0.3), {dt:.1f} s (< 600 s) incl. overkill; {table.notes[2]}")
    assert ok


def test_criterion_4_newton_quadratic_tail():
    cfg = default_config("solve-cylinder-load")
    level = 3  # finest level of the study: 64 x 64
    mesh = build_mesh(cfg, level)
    space = build_space(cfg, mesh)
    _, rep = solve(space, build_material(cfg), build_loads(cfg, space),
                   build_dirichlet(cfg, space), solver_config(cfg))
    r = np.array(rep.last_residuals)
    logs = np.log10(r[-3:])
    second = logs[2] - 2 * logs[1] + logs[0]
    drop = logs[0] - logs[2]
    ok = rep.converged and second < 0 and drop >= 4
    report(4, ok, f"Newton tail on 64x64 cylinder: residuals "
                  + ", ".join(f"{x:.2e}" for x in r)
                  + f"; last-three second difference {second:.2f} (< 0), drop {drop:.1f} "
                    "orders in the final 2 iterations (>= 4)")
    assert ok


# 5: pressure sweep ----------------------------------------------------------------

def test_criterion_5_spheroid_pressure_sweep():
    cfg = default_config("solve-spheroid-pressure")
    t0 = time.perf_counter()
    res = run_pressure_sweep(cfg)
    dt = time.perf_counter() - t0
    rmax, rmin = np.array(res.max_radius), np.array(res.min_radius)
    increasing = bool(np.all(np.diff(rmin) > 0))
    ok = res.completed and res.pressures[-1] == 4800.0 and rmax[1] < 1.0 and increasing
    report(5, ok, f"spheroid sweep to {res.pressures[-1]:.0f} Pa in {len(res.pressures) - 1} "
                  f"steps, Newton iterations {min(res.iterations[1:])}-{max(res.iterations[1:])}, "
                  f"no load stiffness; max radius at {res.pressures[1]:.0f} Pa = {rmax[1]:.6f} m "
                  f"(< 1), min radius {rmin[0]:.4f} -> {rmin[-1]:.4f} m strictly increasing: "
                  f"{increasing}; {dt:.1f} s")
    assert ok


# 6: property suite -------------------------------------------------------------------

def _rel(a, b):
    return float(np.abs(a - b).max() / max(np.abs(b).max(), 1e-300))


def property_measurements():
    rng = np.random.default_rng(2024)
    m = {}
    mats = [make_material("mooney-rivlin", 10e6, 0.5), make_material("hooke", 10e6, 0.3)]
    ep = el = sym = 0.0
    for mat in mats:
        for _ in range(100):
            F = random_F(rng)
            P, L = mat.stress_tangent(F)
            ep = max(ep, _rel(P, fd_jacobian(lambda G: np.asarray(mat.psi(G)), F)))
            el = max(el, _rel(L, fd_jacobian(mat.stress, F)))
    m["a_P"], m["a_L"] = ep, el

    mr = mats[0]
    ec = 0.0
    for _ in range(20):
        N = rng.normal(size=3)
        N /= np.linalg.norm(N)
        Fs = np.eye(3) + 0.2 * rng.normal(size=(3, 3)) @ (np.eye(3) - np.outer(N, N))
        s = solve_director(Fs, N, mr, tol=1e-14 * mr.E)
        fd = fd_jacobian(lambda G: solve_director(G, N, mr, tol=1e-14 * mr.E,
                                                  with_tangent=False).stress, Fs)
        ec = max(ec, _rel(s.tangent, fd))
        sym = max(sym, _rel(s.tangent, s.tangent.transpose(2, 3, 0, 1)))
    m["b"], m["c"] = ec, sym

    cfg = default_config("solve-cylinder-load")
    space = build_space(cfg, build_mesh(cfg, 1))
    mat = build_material(cfg)
    u, _ = solve(space, mat, build_loads(cfg, space), build_dirichlet(cfg, space),
                 solver_config(cfg))
    res = internal_forces(space, mat, u, with_tangent=False)
    N = space.frames.normal
    m["d"] = float(np.linalg.norm(np.einsum("eqij,eqj->eqi", res.stress, N), axis=-1).max()
                   / mat.E)
    n = current_normal(res.F, N)
    m["e"] = float(np.linalg.norm(np.einsum("eqi,eqij->eqj", n, res.stress), axis=-1).max()
                   / np.abs(res.stress).max())

    space2 = FESpace(generate_cylinder(0.5, 0.6, 2, 8, 2), 2)
    X = space2.dof_coordinates()
    worst = 0.0
    for _ in range(10):
        Q = random_rotation(rng)
        u = X @ (Q - np.eye(3)).T
        for e in range(space2.mesh.n_elements):
            f, _ = element_internal(space2, e, u, mr)
            area = space2.frames.weight[e].sum()
            worst = max(worst, np.abs(f).max() / (mr.E * mr.thickness * area))
    m["f"] = worst

    hk = make_material("hooke", 3.0, 0.35)
    p = hk.params
    lam_star = 2 * p.lame_lambda * p.mu / (p.lame_lambda + 2 * p.mu)
    L = solve_director(np.diag([1.0, 1.0, 0.0]), [0, 0, 1.0], hk).tangent[:2, :2, :2, :2]
    d = np.eye(2)
    expect = (lam_star * np.einsum("ij,kl->ijkl", d, d)
              + p.mu * (np.einsum("ik,jl->ijkl", d, d) + np.einsum("il,jk->ijkl", d, d)))
    m["g"] = _rel(L, expect)

    mesh = generate_cylinder(0.5, 0.6, 3, 7, 1)
    mesh = mesh.with_nodes(mesh.nodes + 0.01 * rng.normal(size=mesh.nodes.shape))
    A = scalar_stiffness(FESpace(mesh)).toarray()
    worst = 0.0
    X = mesh.nodes
    W = np.zeros_like(A)
    for tri in mesh.elements:
        for k in range(3):
            o, i, j = tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]
            a, b = X[i] - X[o], X[j] - X[o]
            cot = a @ b / np.linalg.norm(np.cross(a, b))
            W[i, j] -= 0.5 * cot
            W[j, i] -= 0.5 * cot
    for i, j in mesh.edges():
        worst = max(worst, abs(A[i, j] - W[i, j]) / abs(W[i, j]))
    m["h"] = worst
    return m


PROPERTY_LIMITS = {"a_P": 1e-6, "a_L": 1e-5, "b": 1e-5, "c": 1e-8, "d": 1e-9, "e": 1e-8,
                   "f": 1e-9, "g": 1e-12, "h": 1e-12}


def test_criterion_6_property_suite():
    t0 = time.perf_counter()
    m = property_measurements()
    dt = time.perf_counter() - t0
    failed = [k for k, lim in PROPERTY_LIMITS.items() if not m[k] <= lim]
    ok = not failed and dt < 60
    report(6, ok, f"property suite in {dt:.1f} s (< 60 s): "
                  + ", ".join(f"({k}) {m[k]:.1e} <= {PROPERTY_LIMITS[k]:.0e}"
                              for k in PROPERTY_LIMITS)
                  + (f"; failed {failed}" if failed else ""))
    assert ok


# 7: patch test ------------------------------------------------------------------

def patch_stress_spread(mesh, A):
    mat = make_material("hooke", 10e6, 0.3, 0.01)
    space = FESpace(mesh)
    exact = space.dof_coordinates() @ A.T
    edge = clamp_nodes(space, space.boundary, values=exact)
    flat = clamp_nodes(space, ~space.boundary, components=(2,))
    bc = Dirichlet(np.concatenate([edge.dofs, flat.dofs]),
                   np.concatenate([edge.values, flat.values]))
    u, _ = solve(space, mat, (), bc)
    P = internal_forces(space, mat, u).stress
    ref = P[0, 0]
    return float(np.abs(P - ref).max() / np.abs(ref).max()), float(np.abs(u - exact).max())


def test_criterion_7_patch_test():
    A = 1e-4 * np.array([[1.0, 0.5, 0.0], [-0.2, 2.0, 0.0], [0.0, 0.0, 0.0]])
    sq = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], float)
    two = SurfaceMesh(sq, [[0, 1, 2], [0, 2, 3]], 1)
    four = SurfaceMesh(np.vstack([sq, [[0.4, 0.55, 0.0]]]),
                       [[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]], 1)
    s2, _ = patch_stress_spread(two, A)
    s4, du = patch_stress_spread(four, A)
    ok = s2 <= 1e-10 and s4 <= 1e-10 and du <= 1e-10 * np.abs(A).max()
    report(7, ok, f"patch test, Hooke, linear boundary displacement: stress spread "
                  f"{s2:.1e} (two elements), {s4:.1e} (four elements with a free interior node, "
                  f"interior error {du:.1e} m); limit 1e-10")
    assert ok


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion")]
    failures = 0
    for fn in tests:
        try:
            fn()
        except AssertionError as exc:
            failures += 1
            if not ACCEPTANCE_LINES or not ACCEPTANCE_LINES[-1].startswith("FAIL"):
                report(fn.__name__.split("_")[2], False, f"{fn.__name__}: {exc}")
    sys.exit(1 if failures else 0)

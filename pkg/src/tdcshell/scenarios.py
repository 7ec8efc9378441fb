"""Runnable scenarios: single solves, form finding, convergence studies, pressure sweeps.

Every runner takes a ``ScenarioConfig`` and an output directory (or
``None`` to skip writing files) and returns a result object. CSV outputs
contain no timestamps, so identical configurations give identical files.
"""
from dataclasses import dataclass, field
import logging
import math
from pathlib import Path

import numpy as np

from .assembly import ConservativeLoad, Dirichlet, NodalLoad, PressureLoad, clamp_nodes
from .config import ScenarioConfig
from .errors import ConfigError, NonConvergenceError
from .formfind import discrete_area, form_find
from .io import read_off, write_vtk
from .materials import make_material
from .mesh import generate_cylinder, generate_spheroid
from .oracles import catenoid_reference, fit_order
from .solver import SolverConfig, solve
from .space import FESpace

log = logging.getLogger(__name__)

# cylinder axis z -> x, so that the mesh occupies 0 <= x <= L
_AXIS_TO_X = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])


@dataclass(frozen=True)
class CylinderProfile:
    """Load intensity ``g(X) = scale * x (length - x)`` (Pa)."""

    scale: float = 4000.0
    length: float = 4.0

    def __call__(self, X):
        x = np.asarray(X)[..., 0]
        return self.scale * x * (self.length - x)


# building blocks --------------------------------------------------------------

def build_mesh(cfg, level=0):
    """Mesh of the configured scenario, uniformly refined ``level`` times."""
    m = cfg.mesh
    f = 2 ** level
    if m.generator == "cylinder":
        mesh = generate_cylinder(m.radius, m.height, m.axial_divisions * f,
                                 m.circumferential_divisions * f, m.geometry_order)
        if cfg.name == "solve-cylinder-load":
            mesh = mesh.transformed(_AXIS_TO_X, [0.5 * m.height, 0.0, 0.0])
        return mesh
    if m.generator == "spheroid":
        return generate_spheroid(m.r_max, m.r_min, m.refinement + level, m.geometry_order)
    if level:
        raise ConfigError("mesh files cannot be refined; use a generator for studies")
    return read_off(m.path)


def build_space(cfg, mesh):
    if cfg.scenario.iso_p2 and mesh.geometry_order != 2:
        raise ConfigError("iso-P2 displacements need a quadratic mesh")
    degree = 2 if cfg.scenario.iso_p2 else 1
    return FESpace(mesh, min(degree, mesh.geometry_order))


def build_material(cfg):
    m = cfg.material
    return make_material(m.model, m.E, m.nu, m.thickness)


def symmetry_pins(space):
    """Remove rigid motions of a closed surface symmetric about the coordinate planes.

    Nodes on the z-axis are fixed in x and y; the node on the positive
    x-axis is fixed in y and z. By symmetry these supports carry no
    reaction under a symmetric load.
    """
    X = space.dof_coordinates()
    scale = np.abs(X).max()
    axis = np.nonzero(np.hypot(X[:, 0], X[:, 1]) <= 1e-12 * scale)[0]
    on_x = np.nonzero((np.abs(X[:, 1]) <= 1e-12 * scale) & (np.abs(X[:, 2]) <= 1e-12 * scale)
                      & (X[:, 0] > 0))[0]
    if len(axis) < 2 or not len(on_x):
        raise ConfigError("clamp = symmetry needs nodes on the z-axis and on the positive x-axis")
    e = on_x[np.argmax(X[on_x, 0])]
    dofs = np.concatenate([3 * axis, 3 * axis + 1, [3 * e + 1, 3 * e + 2]])
    return Dirichlet(np.sort(dofs), None)


def build_dirichlet(cfg, space):
    kind = cfg.load.clamp
    if kind == "boundary":
        if not space.boundary.any():
            raise ConfigError("clamp = boundary but the mesh has no boundary")
        return clamp_nodes(space, space.boundary)
    if kind == "symmetry":
        return symmetry_pins(space)
    return Dirichlet.empty()


def build_loads(cfg, space, pressure=None):
    ld = cfg.load
    if ld.kind == "cylinder-profile":
        return [ConservativeLoad(CylinderProfile(ld.scale, ld.length))]
    if ld.kind == "pressure":
        return [PressureLoad(ld.pressure if pressure is None else pressure)]
    if ld.kind == "nodal":
        try:
            values = np.loadtxt(ld.path, ndmin=2)
        except ValueError as exc:
            raise ConfigError(f"[load] cannot parse nodal loads: {exc}") from None
        if values.shape != (space.mesh.n_nodes, 3):
            raise ConfigError(f"[load] nodal load file needs {space.mesh.n_nodes} rows of 3 values")
        off = np.ones(space.mesh.n_nodes, bool)
        off[space.dof_nodes] = False
        if np.any(values[off] != 0):
            raise ConfigError("[load] nodal loads on nodes without displacement unknowns")
        return [NodalLoad(values[space.dof_nodes].ravel())]
    return []


def solver_config(cfg, **overrides):
    s = cfg.solver
    base = dict(rel_tol=s.rel_tol, abs_tol_factor=s.abs_tol_factor, max_newton=s.max_newton,
                load_steps=s.load_steps, line_search=s.line_search)
    base.update(overrides)
    return SolverConfig(**base)


def _out(out_dir, name):
    if out_dir is None:
        return None
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d / name


def _write(path, text):
    if path is not None:
        path.write_text(text)


def _fields(space, u):
    u_nodes = space.to_mesh_nodes(u)
    return {"displacement": u_nodes, "position": space.mesh.nodes + u_nodes}


# single solve ---------------------------------------------------------------

@dataclass
class SolveResult:
    space: FESpace
    u: np.ndarray
    report: object
    files: list = field(default_factory=list)


def run_solve(cfg, out_dir=None):
    """One Newton solve of the configured problem; writes VTK, residual CSV and a report."""
    mesh = build_mesh(cfg)
    space = build_space(cfg, mesh)
    material = build_material(cfg)
    loads = build_loads(cfg, space)
    bc = build_dirichlet(cfg, space)
    u, report = solve(space, material, loads, bc, solver_config(cfg))
    res = SolveResult(space, u, report)
    stem = cfg.name
    paths = {"csv": _out(out_dir, f"{stem}_residuals.csv"),
             "txt": _out(out_dir, f"{stem}_report.txt"),
             "vtk": _out(out_dir, f"{stem}.vtk") if cfg.output.vtk else None}
    _write(paths["csv"], report.to_csv())
    _write(paths["txt"], _solve_report_text(cfg, space, u, report))
    if paths["vtk"] is not None:
        write_vtk(mesh, _fields(space, u), paths["vtk"], title=f"{stem} displacement (m)")
    res.files = [p for p in paths.values() if p is not None]
    return res


def _solve_report_text(cfg, space, u, report):
    m = cfg.material
    lines = [f"scenario: {cfg.name}",
             f"material: {m.model} E={m.E:g} Pa nu={m.nu:g} t={m.thickness:g} m",
             f"mesh: {space.mesh.n_elements} elements, geometry order {space.mesh.geometry_order}",
             f"displacement degree: {space.degree}, unknowns: {space.n_dofs}",
             f"max |u|: {np.linalg.norm(u, axis=1).max():.10e} m",
             report.to_table()]
    return "\n".join(lines) + "\n"


# form finding ---------------------------------------------------------------

@dataclass
class FormFindResult:
    mesh: object
    state: object
    area: float
    reference_area: float = float("nan")
    files: list = field(default_factory=list)

    @property
    def area_error(self):
        return abs(self.area - self.reference_area)


def _formfind_kwargs(cfg):
    f = cfg.formfind
    tol = f.movement_tol if f.movement_tol > 0 else None
    return dict(movement_tol=tol, max_outer=f.max_outer,
                displacement_degree=2 if cfg.scenario.iso_p2 else 1,
                acceleration=None if f.acceleration == "none" else f.acceleration,
                pinch_quality=f.pinch_quality)


def catenoid_area(cfg):
    return catenoid_reference(cfg.mesh.radius, 0.5 * cfg.mesh.height)[1]


def run_formfind(cfg, out_dir=None, level=0):
    mesh0 = build_mesh(cfg, level)
    if cfg.scenario.iso_p2 and mesh0.geometry_order != 2:
        raise ConfigError("iso-P2 form finding needs a quadratic mesh")
    stem = cfg.name
    every = cfg.formfind.snapshot_every
    files = []

    def snapshot(n, mesh, state):
        if every and out_dir is not None and n % every == 0:
            p = _out(out_dir, f"{stem}_{n:04d}.vtk")
            write_vtk(mesh, {"position": mesh.nodes}, p, title=f"{stem} iteration {n}")
            files.append(p)

    kw = _formfind_kwargs(cfg)
    kw["displacement_degree"] = min(kw["displacement_degree"], mesh0.geometry_order)
    mesh, state = form_find(mesh0, callback=snapshot, **kw)
    res = FormFindResult(mesh, state, discrete_area(mesh), files=files)
    if cfg.name == "formfind-catenoid":
        res.reference_area = catenoid_area(cfg)
    csv = _out(out_dir, f"{stem}_history.csv")
    _write(csv, state.to_csv())
    txt = _out(out_dir, f"{stem}_report.txt")
    lines = [f"scenario: {stem}", f"iterations: {state.iteration}",
             f"converged: {state.converged}", f"pinching: {state.pinching}",
             f"area: {res.area:.15e} m^2"]
    if cfg.name == "formfind-catenoid":
        lines += [f"catenoid area: {res.reference_area:.15e} m^2",
                  f"area error: {res.area_error:.6e} m^2"]
    _write(txt, "\n".join(lines) + "\n")
    if out_dir is not None and cfg.output.vtk:
        p = _out(out_dir, f"{stem}.vtk")
        write_vtk(mesh, {"position": mesh.nodes, "movement": mesh.nodes - mesh0.nodes}, p,
                  title=f"{stem} final surface")
        files.append(p)
    res.files = [p for p in [csv, txt] if p is not None] + files
    return res


# convergence studies ----------------------------------------------------------

@dataclass
class ConvergenceTable:
    scenario: str
    columns: list  # error column names (with units)
    rows: list = field(default_factory=list)  # (level, h, dofs, *errors)
    fits: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_csv(self):
        head = "level,h_m,dofs," + ",".join(self.columns)
        lines = [head] + [f"{r[0]},{r[1]:.10e},{r[2]}," + ",".join(f"{e:.10e}" for e in r[3:])
                          for r in self.rows]
        return "\n".join(lines) + "\n"

    def summary(self):
        out = [f"scenario: {self.scenario}"] + self.notes
        for name, fit in self.fits.items():
            out.append(f"fitted order ({name}): {fit.order:.4f}  R^2 = {fit.r_squared:.6f}  "
                       f"finest {fit.used} levels, monotone = {fit.monotone}")
        return "\n".join(out) + "\n"


def _cylinder_norms(cfg, level, material, sc):
    mesh = build_mesh(cfg, level)
    space = build_space(cfg, mesh)
    u, report = solve(space, material, build_loads(cfg, space), build_dirichlet(cfg, space), sc)
    uq = space.values_at_quadrature(u)
    N = space.frames.normal
    un = np.einsum("eqi,eqi->eq", uq, N)
    ut = uq - un[..., None] * N
    return mesh, space, report, space.l2_norm(un), space.l2_norm(ut)


def run_convergence_study(cfg, levels=None, out_dir=None, on_level=None):
    """Refinement study of ``formfind-catenoid`` or ``solve-cylinder-load``.

    Level ``k`` multiplies the configured divisions by ``2**k``. The
    catenoid error is ``|A_h - A_exact|``; the cylinder errors are
    differences of L2 norms of the normal and tangential displacement
    against an overkill solve ``overkill_refinements`` levels finer than
    the finest level. If a level fails, the partial table is written
    before the error propagates.
    """
    n = cfg.scenario.levels if levels is None else int(levels)
    if n < 3:
        raise ConfigError("a convergence study needs at least 3 levels")
    csv = _out(out_dir, f"{cfg.name}_convergence.csv")
    txt = _out(out_dir, f"{cfg.name}_convergence.txt")
    m = cfg.mesh
    seq = ", ".join(f"{m.circumferential_divisions * 2 ** k}x{m.axial_divisions * 2 ** k}"
                    for k in range(n))
    disp = "isoparametric P2" if cfg.scenario.iso_p2 else "P1 displacement on P2 geometry"

    if cfg.name == "formfind-catenoid":
        table = ConvergenceTable(cfg.name, ["area_error_m2"])
        table.notes = [f"levels (circumferential x axial): {seq}", f"discretisation: {disp}",
                       f"reference area: {catenoid_area(cfg):.15e} m^2"]

        def level_row(k):
            r = run_formfind(cfg, None, level=k)
            if not r.state.converged:
                table.notes.append(
                    f"level {k}: movement {min(r.state.movements):.2e} m after "
                    f"{r.state.iteration} iterations did not reach the tolerance")
            return r.mesh.max_edge_length(), FESpace(r.mesh, cfg.displacement_degree).n_dofs, \
                [r.area_error]
    elif cfg.name == "solve-cylinder-load":
        table = ConvergenceTable(cfg.name, ["normal_error_m2", "tangential_error_m2"])
        material = build_material(cfg)
        sc = solver_config(cfg)
        ok = n - 1 + cfg.scenario.overkill_refinements
        f = 2 ** ok
        table.notes = [f"levels (circumferential x axial): {seq}", f"discretisation: {disp}",
                       f"overkill: {m.circumferential_divisions * f}x{m.axial_divisions * f}"]
        _, _, rep, ref_n, ref_t = _cylinder_norms(cfg, ok, material, sc)
        table.notes.append(f"overkill L2 norms: normal {ref_n:.12e} m^2, tangential "
                           f"{ref_t:.12e} m^2, Newton iterations {rep.iterations}")

        def level_row(k):
            mesh, space, _, nn, nt = _cylinder_norms(cfg, k, material, sc)
            return mesh.max_edge_length(), space.n_dofs, [abs(ref_n - nn), abs(ref_t - nt)]
    else:
        raise ConfigError(f"no convergence study defined for {cfg.name}")

    try:
        for k in range(n):
            h, dofs, errs = level_row(k)
            table.rows.append((k, h, dofs, *errs))
            if on_level is not None:
                on_level(k, table)
            log.info("level %d: h = %.4e, errors %s", k, h, errs)
    finally:
        _write(csv, table.to_csv())
    hs = [r[1] for r in table.rows]
    for j, name in enumerate(table.columns):
        table.fits[name] = fit_order(hs, [r[3 + j] for r in table.rows])
    _write(txt, table.summary())
    return table


# pressure sweep ---------------------------------------------------------------

@dataclass
class SweepResult:
    pressures: list = field(default_factory=list)  # Pa
    max_radius: list = field(default_factory=list)  # m
    min_radius: list = field(default_factory=list)  # m
    iterations: list = field(default_factory=list)
    reports: list = field(default_factory=list)
    completed: bool = False
    files: list = field(default_factory=list)

    def to_csv(self):
        lines = ["step,pressure_Pa,max_radius_m,min_radius_m,newton_iterations"]
        for k, row in enumerate(zip(self.pressures, self.max_radius, self.min_radius,
                                    self.iterations)):
            p, rmax, rmin, it = row
            lines.append(f"{k},{p:.6f},{rmax:.15e},{rmin:.15e},{it}")
        return "\n".join(lines) + "\n"


def deformed_radii(mesh, u_nodes):
    """Largest in-plane (xy) distance from the axis and largest |z| of the deformed surface."""
    x = mesh.nodes + u_nodes
    return float(np.hypot(x[:, 0], x[:, 1]).max()), float(np.abs(x[:, 2]).max())


def run_pressure_sweep(cfg, out_dir=None, on_step=None):
    """Increase the follower pressure from 0 to ``[load] pressure`` in ``pressure_step`` increments.

    Each increment is one Newton solve started from the previous state.
    If a step fails the table written so far is kept and the error is
    re-raised with the failing pressure in its message.
    """
    if cfg.load.kind != "pressure":
        raise ConfigError("a pressure sweep needs [load] kind = pressure")
    mesh = build_mesh(cfg)
    space = build_space(cfg, mesh)
    material = build_material(cfg)
    bc = build_dirichlet(cfg, space)
    sc = solver_config(cfg, load_steps=1)
    p_max, dp = cfg.load.pressure, cfg.load.pressure_step
    n_steps = int(math.ceil(p_max / dp - 1e-9))
    pressures = [min(p_max, k * dp) for k in range(1, n_steps + 1)]
    snaps = list(cfg.load.snapshot_pressures)
    res = SweepResult()
    zero = np.zeros((space.n_dof_nodes, 3))
    rmax, rmin = deformed_radii(mesh, space.to_mesh_nodes(zero))
    res.pressures.append(0.0)
    res.max_radius.append(rmax)
    res.min_radius.append(rmin)
    res.iterations.append(0)
    csv = _out(out_dir, f"{cfg.name}_radii.csv")
    u = zero
    try:
        for p in pressures:
            try:
                u, report = solve(space, material, [PressureLoad(p)], bc, sc, initial_u=u)
            except NonConvergenceError as exc:
                raise NonConvergenceError(f"pressure sweep failed at {p:g} Pa: {exc}",
                                          exc.report) from exc
            u_nodes = space.to_mesh_nodes(u)
            rmax, rmin = deformed_radii(mesh, u_nodes)
            res.pressures.append(p)
            res.max_radius.append(rmax)
            res.min_radius.append(rmin)
            res.iterations.append(report.iterations[-1])
            res.reports.append(report)
            if on_step is not None:
                on_step(p, res)
            if out_dir is not None and cfg.output.vtk and any(abs(p - s) < 1e-6 for s in snaps):
                path = _out(out_dir, f"{cfg.name}_{p:.0f}Pa.vtk")
                write_vtk(mesh, _fields(space, u), path, title=f"spheroid at {p:g} Pa")
                res.files.append(path)
        res.completed = True
    finally:
        _write(csv, res.to_csv())
    if csv is not None:
        res.files.insert(0, csv)
    return res


def run_scenario(cfg: ScenarioConfig, out_dir=None):
    """Default action of a scenario: form finding, a sweep or a single solve."""
    if cfg.name.startswith("formfind"):
        return run_formfind(cfg, out_dir)
    if cfg.name == "solve-spheroid-pressure":
        return run_pressure_sweep(cfg, out_dir)
    return run_solve(cfg, out_dir)


__all__ = ["CylinderProfile", "build_mesh", "build_space", "build_material", "build_loads",
           "build_dirichlet", "symmetry_pins", "solver_config", "run_solve", "run_formfind",
           "run_convergence_study", "run_pressure_sweep", "run_scenario", "SolveResult",
           "FormFindResult", "ConvergenceTable", "SweepResult", "deformed_radii",
           "catenoid_area"]

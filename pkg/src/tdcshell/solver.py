"""Global Newton iteration with load stepping."""
import io
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import Dirichlet, DirectorField, assemble
from .errors import NonConvergenceError, ParameterError, SingularMatrixError, TdcError

log = logging.getLogger(__name__)


@dataclass
class SolverConfig:
    rel_tol: float = 1e-8
    abs_tol_factor: float = 1e-10  # times E * t, used when the external load vanishes
    max_newton: int = 50
    load_steps: int = 1
    ps_tol: float = None  # plane-stress tolerance; None -> 1e-9 * E
    line_search: bool = False
    max_halvings: int = 8
    load_stiffness: bool = False  # reserved; only the default (False) is available

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol_factor > 0):
            raise ParameterError("tolerances must be positive")
        if self.load_steps < 1 or self.max_newton < 1:
            raise ParameterError("load_steps and max_newton must be >= 1")
        if self.ps_tol is not None and not self.ps_tol > 0:
            raise ParameterError("ps_tol must be positive")
        if self.load_stiffness:
            raise ParameterError("assembly of the pressure load stiffness is not implemented")


@dataclass
class StepRecord:
    step: int
    load_factor: float
    residuals: list = field(default_factory=list)  # absolute free-DOF residual norms (N)
    reference: float = 1.0  # norm used for the relative criterion
    energies: list = field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self):
        return len(self.residuals)


@dataclass
class SolveReport:
    steps: list = field(default_factory=list)
    converged: bool = False
    final_energy: float = float("nan")
    rate: str = "n/a"

    @property
    def iterations(self):
        return [s.iterations for s in self.steps]

    @property
    def last_residuals(self):
        return self.steps[-1].residuals if self.steps else []

    def to_csv(self):
        buf = io.StringIO()
        buf.write("step,iteration,load_factor,residual_N,relative_residual\n")
        for s in self.steps:
            for k, r in enumerate(s.residuals):
                buf.write(f"{s.step},{k},{s.load_factor:.12g},{r:.6e},{r / s.reference:.6e}\n")
        return buf.getvalue()

    def to_table(self):
        lines = [f"{'step':>4} {'iter':>4} {'load':>8} {'|r| [N]':>12} {'|r|/|f|':>12}"]
        for s in self.steps:
            for k, r in enumerate(s.residuals):
                lines.append(f"{s.step:>4} {k:>4} {s.load_factor:>8.4f} {r:>12.4e} "
                             f"{r / s.reference:>12.4e}")
        lines.append(f"converged: {self.converged}  rate: {self.rate}  "
                     f"energy: {self.final_energy:.10e}")
        return "\n".join(lines)


def classify_rate(residuals):
    """'quadratic', 'superlinear' or 'linear' from the last three residuals."""
    r = [x for x in residuals if x > 0]
    if len(r) < 3:
        return "n/a"
    a, b, c = np.log(r[-3:])
    if b >= a:
        return "stagnant"
    q = (c - b) / (b - a)
    if q >= 1.6:
        return "quadratic"
    if q > 1.15:
        return "superlinear"
    return "linear"


def _zero_row(K):
    K = K.tocsr()
    norms = np.asarray(abs(K).max(axis=1).todense()).ravel()
    zero = np.nonzero(norms == 0)[0]
    return int(zero[0]) if len(zero) else None


def factorize(A):
    """Sparse LU of a structurally symmetric matrix.

    Diagonal pivoting with a minimum-degree ordering of ``A + A^T`` is
    tried first (symmetric tangents); if that yields a poor solve the
    caller can fall back to ``factorize_pivoting``.
    """
    A = sp.csc_matrix(A)
    zr = _zero_row(A)
    if zr is not None:
        raise SingularMatrixError(f"zero pivot: empty row for DOF {zr}", dof=zr)
    try:
        return spla.splu(A, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                         options=dict(SymmetricMode=True))
    except RuntimeError as exc:
        raise SingularMatrixError(f"singular matrix: {exc}") from exc


def factorize_pivoting(A):
    try:
        return spla.splu(sp.csc_matrix(A), permc_spec="COLAMD")
    except RuntimeError as exc:
        raise SingularMatrixError(f"singular matrix: {exc}") from exc


def _solve_with(lu, A, b):
    x = lu.solve(b)
    if not np.all(np.isfinite(x)):
        return x, np.inf
    bn = np.linalg.norm(b)
    if bn == 0:
        return x, 0.0
    r = b - A @ x
    rel = np.linalg.norm(r) / bn
    if rel > 1e-12:
        x = x + lu.solve(r)
        rel = np.linalg.norm(b - A @ x) / bn
    return x, rel


def linear_solve(system, rhs=None):
    """Direct sparse solve of ``tangent x = -residual`` (or ``A x = rhs``).

    ``system`` is a ``GlobalSystem`` or a sparse matrix (then ``rhs`` is
    required). The linear residual is checked, with one step of iterative
    refinement and a pivoting fallback when it exceeds 1e-12 relative.
    """
    if rhs is None:
        A, b = system.tangent, -system.residual
    else:
        A, b = system, np.asarray(rhs, float)
    A = sp.csc_matrix(A)
    x, rel = _solve_with(factorize(A), A, b)
    if rel > 1e-12:
        x2, rel2 = _solve_with(factorize_pivoting(A), A, b)
        if rel2 < rel:
            x, rel = x2, rel2
    if not np.isfinite(rel):
        raise SingularMatrixError("singular matrix: non-finite solution")
    return x


def solve(space, material, loads=(), dirichlet=None, config=None, initial_u=None,
          callback=None):
    """Newton solution of the membrane equilibrium with linear load ramping.

    Returns ``(u, report)`` with ``u`` of shape (n_dof_nodes, 3). Raises
    ``NonConvergenceError`` (carrying the report) when a step exceeds
    ``max_newton`` iterations.
    """
    cfg = config or SolverConfig()
    dirichlet = dirichlet or Dirichlet.empty()
    n = space.n_dofs
    u = np.zeros(n) if initial_u is None else np.array(initial_u, float).ravel()
    u = dirichlet.apply(u)
    directors = DirectorField(space)
    report = SolveReport()
    abs_floor = cfg.abs_tol_factor * material.E * material.thickness
    free = ~dirichlet.mask(n)

    for step in range(1, cfg.load_steps + 1):
        scale = step / cfg.load_steps
        rec = StepRecord(step, scale)
        report.steps.append(rec)
        for it in range(cfg.max_newton + 1):
            system = assemble(space, material, u, loads, dirichlet, directors, scale,
                              tol=cfg.ps_tol)
            rnorm = float(np.linalg.norm(system.residual))
            if it == 0:
                ext = float(np.linalg.norm(system.external[free]))
                rec.reference = ext if ext > 0 else 1.0
            rec.residuals.append(rnorm)
            rec.energies.append(system.energy)
            if callback is not None:
                callback(step, it, u, system)
            tol = cfg.rel_tol * ext if ext > 0 else abs_floor
            log.debug("step %d iter %d |r| = %.3e (tol %.1e)", step, it, rnorm, tol)
            if rnorm <= tol:
                rec.converged = True
                break
            if it == cfg.max_newton:
                break
            du = linear_solve(system)
            if cfg.line_search:
                u = _backtrack(space, material, loads, dirichlet, directors, scale, cfg,
                               u, du, rnorm)
            else:
                u = u + du
        if not rec.converged:
            report.rate = classify_rate(rec.residuals)
            raise NonConvergenceError(
                f"Newton did not converge in {cfg.max_newton} iterations at load step {step}",
                report)
        report.final_energy = rec.energies[-1]
    report.converged = True
    report.rate = classify_rate(report.last_residuals)
    return u.reshape(-1, 3), report


def _backtrack(space, material, loads, dirichlet, directors, scale, cfg, u, du, rnorm):
    alpha = 1.0
    for _ in range(cfg.max_halvings):
        trial = u + alpha * du
        d = directors.copy()
        try:
            r = assemble(space, material, trial, loads, dirichlet, d, scale,
                         tol=cfg.ps_tol, with_tangent=False).residual
            if np.linalg.norm(r) < rnorm:
                return trial
        except TdcError:  # inverted trial state: shrink further
            pass
        alpha *= 0.5
    return u + alpha * du

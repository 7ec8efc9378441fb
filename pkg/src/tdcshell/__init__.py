"""Large-deformation hyperelastic membrane shells on triangulated surfaces.

Surface operators are written in Cartesian coordinates through the
tangent-plane projector; plane stress is enforced by a local director
solve with a condensed consistent tangent.
"""
from .errors import *  # noqa: F401,F403
from .mesh import SurfaceMesh, generate_cylinder, generate_disk, generate_spheroid, make_quadratic
from .reference import ReferenceElement, quadrature, reference_element
from .tangential import FrameSet, compute_frames, element_frames, surface_gradient
from .space import FESpace
from .materials import Hooke, Material, MaterialParams, MooneyRivlin, make_material
from .plane_stress import PlaneStressState, condensed_tangent, solve_director
from .assembly import (ConservativeLoad, Dirichlet, NodalLoad, PressureLoad, assemble,
                       clamp_nodes, element_internal, internal_forces)
from .solver import SolveReport, SolverConfig, linear_solve, solve
from .formfind import FormFindState, discrete_area, form_find, laplace_beltrami_step
from .io import read_off, write_off, write_vtk

__version__ = "0.1.0"

"""Edge finite elements for Maxwell's equations in nonlinear Debye media (2D TE)."""

from .assembly import assemble_load, assemble_mass, assemble_stiffness, assemble_weighted_mass
from .harness import RunConfig, compute_errors, converge, load_config, parse_config
from .manufactured import example1, example2, get_case, zero_case
from .mesh import DomainKind, MeshError, QuadMesh, build_mesh, macro_pairing
from .nonlinearity import NonlinearLaw, PhysParams, make_law, max_admissible_dt
from .postprocess import MacroField, postprocess_E, postprocess_P
from .spaces import CellField, EdgeField, interp_edge, project_W
from .timestepper import InadmissibleTimeStep, Stepper, StepperConfig, run

__version__ = "0.1.0"

__all__ = [
    "CellField", "DomainKind", "EdgeField", "InadmissibleTimeStep", "MacroField", "MeshError",
    "NonlinearLaw", "PhysParams", "QuadMesh", "RunConfig", "Stepper", "StepperConfig",
    "assemble_load", "assemble_mass", "assemble_stiffness", "assemble_weighted_mass",
    "build_mesh", "compute_errors", "converge", "example1", "example2", "get_case",
    "interp_edge", "load_config", "macro_pairing", "make_law", "max_admissible_dt",
    "parse_config", "postprocess_E", "postprocess_P", "project_W", "run", "zero_case",
]

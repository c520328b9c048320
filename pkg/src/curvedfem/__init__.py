"""Cubic curved-triangle finite elements and a Picard solver for
anti-plane shear of a strain-limiting elastic body."""

from .assembly import BoundaryData, SparseSystem, apply_dirichlet, assemble_bilinear, assemble_load, flux_coefficient
from .element import jacobian, map_point, physical_gradients, shape_gradients, shape_values
from .errors import (
    ConfigurationError,
    CurvedFemError,
    DegenerateElementError,
    GeometryError,
    MeshParseError,
    SolverError,
)
from .generators import (
    DomainSpec,
    NotchSpec,
    generate_square_mesh,
    generate_vnotch_inclusions_mesh,
    generate_vnotch_mesh,
)
from .geometry import ArcSpec, circle, interior_node, place_curved_edge_nodes
from .mesh import Mesh, read_mesh, validate_mesh, write_mesh
from .quadrature import QuadratureRule, quadrature_rule
from .solver import IterationTrace, PicardConfig, Solution, initial_guess, picard_solve, residual, solve_linear

__version__ = "0.1.0"

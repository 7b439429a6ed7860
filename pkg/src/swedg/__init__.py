"""Entropy-stable positivity-preserving DG solver for the shallow water
equations on 1D intervals and 2D triangular meshes.

High-order entropy-stable SBP discretization, a graph-viscosity low-order
positivity-preserving scheme, and convex limiting that blends the two
updates element-locally while conserving mass.
"""

from .cases import CASES, get_case
from .discretization import Discretization, build_discretization
from .errors import compute_l2_error
from .kernels import (dt_low_bound, face_fluxes, flux_matrix_high,
                      flux_matrix_low, rhs_high, rhs_low)
from .limiter import (apply_limited_update, assemble_correction,
                      compute_factors, PositivityError)
from .loworder import (build_connectivity_graph, build_low_order_operators,
                       smallest_connected_alpha)
from .mesh import (build_face_connectivity, build_split_quad_trimesh,
                   build_uniform_mesh_1d, compute_geometric_factors)
from .physics import PhysParams
from .refelem import (build_lobatto_sbp_1d, build_triangle_sbp_operators,
                      load_triangle_sbp_nodes, verify_sbp)
from .runner import SimulationConfig, run_convergence_study, run_simulation
from .timestep import advance, dt_high, step_ssprk2

__version__ = "0.1.0"

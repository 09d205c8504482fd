"""Mode-by-mode solvers for the stability of subsonic boundary-layer
shear flows, from the linearized solves through the nonlinear fixed point
and the low-Mach-number comparison."""

from .grid import Grid, ComplexField, build_grid
from .profiles import ShearProfile, make_default_profile, make_profile, \
    check_structural_conditions
from .norms import NormReport, compute_norms
from .airy import airy_ai, airy_antiderivative, sublayer_profile_w
from .operators import ModeOperators
from .rayleigh import solve_rayleigh_inhomogeneous, \
    solve_rayleigh_homogeneous
from .airy_solvers import solve_tilde_airy, solve_classical_airy_neumann
from .orr_sommerfeld import solve_os_symmetrized, solve_os_full, \
    solve_os_high_freq, os_remainder_series, slow_mode, fast_mode, \
    IterationDiverged
from .quasi_compressible import lift_to_fluid, solve_qc_inhomogeneous, \
    homogeneous_qc, qc_error
from .stokes import solve_stokes
from .linear_solver import solve_zero_mode, qc_stokes_iteration, \
    solve_slip_high_freq, boundary_corrector, solve_mode, solve_linear_ns, \
    FlowState
from .nonlinear import picard_solve, low_mach_compare
from .data import ExternalForce
from .config import RunConfig, parse_config, load_config

__version__ = "0.1.0"

"""Mean-field solver for a three-site Dicke lattice with photon and atom hopping.

Computes ground states (normal, normal-superradiant, frustrated-superradiant),
excitation spectra via symplectic diagonalization, critical points, and full
phase diagrams, with an independent brute-force verification oracle.
"""

__version__ = "0.1.0"

from .model import (
    ModelParams,
    Coefficients,
    CriticalCouplings,
    RegionLabel,
    ParameterError,
    coefficients,
    hopping_matrix,
    x_from_alpha,
    alpha_from_x,
    critical_couplings,
    dividing_curve,
    first_order_point,
    classify_region,
)
from .meanfield import (
    DomainError,
    MeanFieldState,
    PhaseResult,
    energy,
    gradient,
    hessian,
    state_from_x,
    solve_np,
    solve_nsp,
    solve_fsp,
    asymptotic_fsp,
    solve_ground_state,
    root_structure,
    solve_atom_only,
)
from .spectrum import (
    QuadraticForm,
    SpectrumResult,
    build_quadratic,
    symplectic_eigenvalues,
    analytic_np_spectrum,
    soft_mode_gap,
    fit_critical_exponent,
)
from .oracle import OracleConfig, brute_force_minimize, detect_transitions

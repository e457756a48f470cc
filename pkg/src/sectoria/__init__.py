"""Numerical verification of numerical-range containment for sectorial
generators, their contraction semigroups and Euler approximations."""

from .errors import CertificationFailure, DegenerateAngle, NonHermitianInput, SectoriaError, SingularMatrix
from .linalg import herm_eigen, jacobi_eigh, matrix_exp, operator_norm, solve
from .numrange import RangeHull, compute_hull, hull_in_region, support_point
from .regions import (
    Family,
    RegionSpec,
    boundary_samples,
    containment_check,
    contains,
    dist_to_region,
    margin,
    omega_boundary_point,
    omega_convexity_check,
    omega_max_im,
    semigroup_closure_check,
)
from .report import Check, VerifyReport
from .rng import SplitMix64
from .sectorial import (
    SectorialMatrix,
    cayley,
    class_c_norms,
    inverse_cayley,
    random_sectorial,
    resolvent_contraction,
)
from .semigroup import euler_approx, euler_bound, euler_error_table, k_upper, scalar_g_sup, semigroup
from .suite import RunConfig, run_suite

__version__ = "0.1.0"

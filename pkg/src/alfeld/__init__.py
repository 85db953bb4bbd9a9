"""Exact construction and verification of C^r finite elements on the Alfeld split."""

from .barypoly import BaryPoly, Frame, PiecewisePoly
from .dimension import compute_B, dim_shape, dim_superspline, minimal_table, rho_star, schenck_dim
from .dofs import DofFunctional, build_global_dofs, build_local_dofs, evaluate_dof
from .exact import Factorization, RatMatrix, Rational, determinant, nullspace, rank_and_nullity
from .geometry import Mesh, SplitSimplex, alfeld_split, builtin_mesh, load_mesh, parse_mesh, reference_simplex
from .multiindex import ElementConfig, check_assumption, decomposition_pair, refined_decomposition
from .qop import apply_q, invert_q, vanishing_transfer_check
from .spline_space import (
    continuity_check,
    dimension_oracle,
    dual_basis_check,
    membership_test,
    shape_basis,
    unisolvence_check,
)

__all__ = [
    "BaryPoly",
    "DofFunctional",
    "ElementConfig",
    "Factorization",
    "Frame",
    "Mesh",
    "PiecewisePoly",
    "RatMatrix",
    "Rational",
    "SplitSimplex",
    "alfeld_split",
    "apply_q",
    "build_global_dofs",
    "build_local_dofs",
    "builtin_mesh",
    "check_assumption",
    "compute_B",
    "continuity_check",
    "decomposition_pair",
    "determinant",
    "dim_shape",
    "dim_superspline",
    "dimension_oracle",
    "dual_basis_check",
    "evaluate_dof",
    "invert_q",
    "load_mesh",
    "membership_test",
    "minimal_table",
    "nullspace",
    "parse_mesh",
    "rank_and_nullity",
    "reference_simplex",
    "refined_decomposition",
    "rho_star",
    "schenck_dim",
    "shape_basis",
    "unisolvence_check",
    "vanishing_transfer_check",
]

"""Numerical toolkit for cohomogeneity-one special Lagrangian submanifolds of
the tangent bundle of complex projective space with its Stenzel metric."""

from .errors import *  # noqa: F401,F403
from .projective import ProjectivePair, TangentRep, eval_A, eval_B, eval_N, phi_hat, zero_section
from .slag import (
    ProfileCurve,
    SlagReport,
    closed_form_G,
    frame_G,
    frame_volume,
    integrate_profile,
    matched_psi,
    moment_residual,
    verify_special_on_curve,
)
from .stenzel import (
    PotentialTable,
    check_cy_condition,
    holomorphic_volume,
    kahler_two_form,
    liouville,
    omega_tangent,
    solve_potential,
)
from .symmetric_pairs import LieAlgebraElement, SymmetricPairCase, fundamental_vector, orbit_tangent_rank
from .verification import SuiteConfig, run_structure_suite, run_theorem_suite

__version__ = "0.1.0"

__all__ = [
    "LieAlgebraElement",
    "PotentialTable",
    "ProfileCurve",
    "ProjectivePair",
    "SlagReport",
    "SuiteConfig",
    "SymmetricPairCase",
    "TangentRep",
    "check_cy_condition",
    "closed_form_G",
    "eval_A",
    "eval_B",
    "eval_N",
    "frame_G",
    "frame_volume",
    "fundamental_vector",
    "holomorphic_volume",
    "integrate_profile",
    "kahler_two_form",
    "liouville",
    "matched_psi",
    "moment_residual",
    "omega_tangent",
    "orbit_tangent_rank",
    "phi_hat",
    "run_structure_suite",
    "run_theorem_suite",
    "solve_potential",
    "verify_special_on_curve",
    "zero_section",
]

"""Collision operators: full Boltzmann quadrature, linearisation, K split and BGK."""
from .bgk import bgk_operator, bgk_rate, match_maxwellian, relax_exact
from .operators import (
    CollisionDiagnostics,
    KernelConfig,
    NumericalRankError,
    abs_cos,
    angular_total,
    assemble_L,
    collide_Q,
    collision_frequency,
    cutoff_chi,
    hydrodynamic_basis,
    interpolate,
    linearized_L,
    measure_coercivity,
    project_P,
    split_K,
    cutoff_operator_norm,
)

__all__ = [
    "CollisionDiagnostics",
    "KernelConfig",
    "NumericalRankError",
    "abs_cos",
    "angular_total",
    "assemble_L",
    "bgk_operator",
    "bgk_rate",
    "collide_Q",
    "collision_frequency",
    "cutoff_chi",
    "hydrodynamic_basis",
    "interpolate",
    "linearized_L",
    "match_maxwellian",
    "measure_coercivity",
    "project_P",
    "relax_exact",
    "split_K",
    "cutoff_operator_norm",
]

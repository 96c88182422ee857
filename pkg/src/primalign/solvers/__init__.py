"""Interchangeable SE(3) solvers over multi-primitive pairings."""
from .base import SolverResult, translation_from_centroids
from .gauss_newton import GnOptions, ResidualBlock, residual_blocks, solve_gn
from .horn import horn_rotation, profile_matrix, solve_horn
from .olae import (
    OlaeSystem,
    attitude_profile,
    candidate_determinants,
    olae_rotation,
    sequential_rotation_select,
    solve_linear_3x3,
    solve_olae,
)

__all__ = [
    "SolverResult",
    "translation_from_centroids",
    "GnOptions",
    "ResidualBlock",
    "residual_blocks",
    "solve_gn",
    "horn_rotation",
    "profile_matrix",
    "solve_horn",
    "OlaeSystem",
    "attitude_profile",
    "candidate_determinants",
    "olae_rotation",
    "sequential_rotation_select",
    "solve_linear_3x3",
    "solve_olae",
]

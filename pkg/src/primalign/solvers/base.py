"""Shared result type for the three SE(3) solvers."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..geometry import Pose


@dataclass(frozen=True)
class SolverResult:
    """Estimated pose plus per-solve diagnostics.

    ``iterations`` is 0 for the closed-form solvers.  ``determinants`` and
    ``sequential_axis`` are filled by the linear attitude solver only.
    """

    pose: Pose
    inlier_point_indices: np.ndarray
    method: str
    iterations: int = 0
    converged: bool = True
    sequential_axis: str | None = None
    determinants: dict[str, float] | None = None
    final_cost: float | None = None


def translation_from_centroids(rot, centroid_a, centroid_b):
    """Optimal translation once the rotation is fixed: t = c_a - R c_b."""
    return centroid_a - rot @ centroid_b

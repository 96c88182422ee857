"""Optimal quaternion solver over unified vector pairs.

The rotation maximizing sum(w_i va_i . R vb_i) is the dominant
eigenvector of a symmetric 4x4 profile matrix assembled from the weighted
cross-covariance of the two vector lists; the translation then follows
from the inlier point centroids.  The eigenproblem is solved by cyclic
Jacobi sweeps (deterministic, dependency-free) in the kernel backend.
"""
from __future__ import annotations

import numpy as np

from .. import _kernels
from ..errors import DegenerateGeometry
from ..geometry import Pose, quat_canonical
from ..pairings import build_horn_vectors
from .base import SolverResult, translation_from_centroids

# Relative gap under which the two largest eigenvalues are considered
# coincident, i.e. the optimal rotation is not unique.
EIGEN_GAP = 1e-9


def profile_matrix(uv):
    """Symmetric 4x4 eigenproblem matrix for the unified vector lists."""
    b, _ = _kernels.cross_covariance(uv.va, uv.vb, uv.weights)
    tr = b[0, 0] + b[1, 1] + b[2, 2]
    n = np.empty((4, 4))
    n[0, 0] = tr
    n[0, 1] = n[1, 0] = b[1, 2] - b[2, 1]
    n[0, 2] = n[2, 0] = b[2, 0] - b[0, 2]
    n[0, 3] = n[3, 0] = b[0, 1] - b[1, 0]
    n[1, 1] = b[0, 0] - b[1, 1] - b[2, 2]
    n[1, 2] = n[2, 1] = b[0, 1] + b[1, 0]
    n[1, 3] = n[3, 1] = b[2, 0] + b[0, 2]
    n[2, 2] = -b[0, 0] + b[1, 1] - b[2, 2]
    n[2, 3] = n[3, 2] = b[1, 2] + b[2, 1]
    n[3, 3] = -b[0, 0] - b[1, 1] + b[2, 2]
    return n


def horn_rotation(uv):
    """Optimal rotation as a unit quaternion.

    Raises DegenerateGeometry when the two largest eigenvalues coincide
    (the maximizer is not unique, e.g. all vectors parallel).
    """
    values, vectors = _kernels.sym4_eigs(profile_matrix(uv))
    gap = values[0] - values[1]
    if gap <= EIGEN_GAP * max(1.0, abs(values[0])):
        raise DegenerateGeometry(
            f"rotation not unique: top eigenvalue gap {gap:.3e}"
        )
    return quat_canonical(vectors[:, 0])


def solve_horn(pairings, s_t=None, kind_scales=(1.0, 1.0, 1.0)):
    """Closed-form pose from a pairing set.

    ``s_t`` enables the scale-mismatch outlier rejection on point pairs;
    the translation uses the centroids of the surviving pairs.
    """
    uv = build_horn_vectors(pairings, s_t=s_t, kind_scales=kind_scales)
    q = horn_rotation(uv)
    pose = Pose(q, np.zeros(3))
    t = translation_from_centroids(pose.matrix(), uv.centroid_a, uv.centroid_b)
    return SolverResult(
        pose=Pose(q, t),
        inlier_point_indices=uv.inlier_point_indices,
        method="horn",
    )

"""Linear attitude solver over unified unit-vector pairs.

The optimal Gibbs-Rodrigues vector solves the 3x3 system M_w g = z built
from the attitude profile matrix.  Because the Gibbs parameterization is
singular at 180 degrees, four candidate systems are formed - the original
plus one pre-rotated by 180 degrees about each axis - and the one with the
largest absolute determinant is solved; the chosen pre-rotation is undone
on the recovered quaternion.  The rotated systems come in closed form from
the profile matrix, with no second pass over the input vectors.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..errors import DegenerateGeometry
from ..geometry import Pose, quat_canonical, quat_from_gibbs, quat_multiply
from ..pairings import build_olae_unit_vectors
from .base import SolverResult, translation_from_centroids

# A candidate system with |det(M_w)| below this is treated as singular.
DET_FLOOR = 1e-12

# 180-degree pre-rotations: axis name, rotation matrix, quaternion.
_SEQUENTIAL = (
    ("none", np.eye(3), np.array([1.0, 0.0, 0.0, 0.0])),
    ("x", np.diag([1.0, -1.0, -1.0]), np.array([0.0, 1.0, 0.0, 0.0])),
    ("y", np.diag([-1.0, 1.0, -1.0]), np.array([0.0, 0.0, 1.0, 0.0])),
    ("z", np.diag([-1.0, -1.0, 1.0]), np.array([0.0, 0.0, 0.0, 1.0])),
)


@dataclass(frozen=True)
class OlaeSystem:
    """Attitude profile matrix and the derived linear system.

    ``m`` is kept for completeness alongside ``p`` although only ``p``
    enters the M_w system solved here.
    """

    b_mat: np.ndarray
    s_mat: np.ndarray
    p: float
    m: float
    z: np.ndarray
    m_w: np.ndarray

    @staticmethod
    def from_profile(b_mat):
        """Derive S, p, m, z, and M_w from the profile matrix B.

        z comes from the identity [z]_x = B - B^T, so no re-summation of
        the input vectors is ever needed.
        """
        s_mat = b_mat + b_mat.T
        tr = float(b_mat[0, 0] + b_mat[1, 1] + b_mat[2, 2])
        z = np.array(
            [
                b_mat[2, 1] - b_mat[1, 2],
                b_mat[0, 2] - b_mat[2, 0],
                b_mat[1, 0] - b_mat[0, 1],
            ]
        )
        p = tr + 1.0
        return OlaeSystem(
            b_mat=b_mat,
            s_mat=s_mat,
            p=p,
            m=tr - 1.0,
            z=z,
            m_w=s_mat - p * np.eye(3),
        )


def attitude_profile(uv):
    """OlaeSystem for unified unit-vector lists.

    Weights are renormalized to sum one so that p = tr(B) + 1 keeps its
    intended scale regardless of the caller's weighting.
    """
    w = uv.weights / uv.weights.sum()
    b_mat, _ = _kernels.cross_covariance(uv.va, uv.vb, w)
    return OlaeSystem.from_profile(b_mat)


def _det3(m):
    return float(
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )


def candidate_determinants(sys):
    """det(M_w) of the original and the three pre-rotated systems."""
    return {
        axis: _det3(OlaeSystem.from_profile(rot @ sys.b_mat).m_w)
        for axis, rot, _ in _SEQUENTIAL
    }


def sequential_rotation_select(sys):
    """Best-conditioned system among the original and three pre-rotations.

    Returns (axis, system) where axis is "none", "x", "y", or "z".  The
    pre-rotated profile is B' = R_axis B, i.e. the frame-b vectors are
    rotated by 180 degrees about the axis; z' and M_w' follow from B' in
    closed form.  Raises DegenerateGeometry when every candidate system is
    singular.
    """
    best = None
    for axis, rot, _ in _SEQUENTIAL:
        cand = sys if axis == "none" else OlaeSystem.from_profile(rot @ sys.b_mat)
        det = _det3(cand.m_w)
        if best is None or abs(det) > abs(best[2]):
            best = (axis, cand, det)
    axis, cand, det = best
    if abs(det) < DET_FLOOR:
        raise DegenerateGeometry(
            f"all sequential-rotation systems are singular (best |det| = {abs(det):.3e})"
        )
    return axis, cand


def solve_linear_3x3(a, b):
    """Gaussian elimination with partial pivoting on a 3x3 system."""
    m = np.concatenate([np.array(a, dtype=np.float64), np.reshape(b, (3, 1))], axis=1)
    for col in range(3):
        pivot = col + int(np.argmax(np.abs(m[col:, col])))
        if abs(m[pivot, col]) < 1e-300:
            raise DegenerateGeometry("singular 3x3 system")
        if pivot != col:
            m[[col, pivot]] = m[[pivot, col]]
        for row in range(col + 1, 3):
            factor = m[row, col] / m[col, col]
            m[row, col:] -= factor * m[col, col:]
    x = np.empty(3)
    for row in (2, 1, 0):
        x[row] = (m[row, 3] - m[row, row + 1:3] @ x[row + 1:]) / m[row, row]
    return x


def olae_rotation(uv, sequential=True):
    """Rotation quaternion plus (axis, determinants) diagnostics."""
    sys = attitude_profile(uv)
    dets = candidate_determinants(sys)
    if sequential:
        axis, chosen = sequential_rotation_select(sys)
    else:
        axis, chosen = "none", sys
        if abs(dets["none"]) < DET_FLOOR:
            raise DegenerateGeometry(
                f"M_w is singular (|det| = {abs(dets['none']):.3e}); "
                "the rotation is at or near the 180 degree singularity"
            )
    g = solve_linear_3x3(chosen.m_w, chosen.z)
    q = quat_from_gibbs(g)
    q_axis = next(qa for name, _, qa in _SEQUENTIAL if name == axis)
    return quat_canonical(quat_multiply(q, q_axis)), axis, dets


def solve_olae(pairings, s_t=None, kind_scales=(1.0, 1.0, 1.0), sequential=True):
    """Pose from a pairing set via the linear attitude estimator.

    ``sequential=False`` disables the 180-degree pre-rotations and solves
    the unmodified system only (it then fails near the Gibbs singularity;
    the flag exists to demonstrate why the mechanism is needed).
    """
    uv = build_olae_unit_vectors(pairings, s_t=s_t, kind_scales=kind_scales)
    q, axis, dets = olae_rotation(uv, sequential=sequential)
    pose = Pose(q, np.zeros(3))
    t = translation_from_centroids(pose.matrix(), uv.centroid_a, uv.centroid_b)
    return SolverResult(
        pose=Pose(q, t),
        inlier_point_indices=uv.inlier_point_indices,
        method="olae",
        sequential_axis=axis,
        determinants=dets,
    )

"""Iterative Gauss-Newton baseline over SE(3) with analytic Jacobians.

Residuals per pairing kind (T = current pose, p = T(b)):

    point-to-point   r = a - T(b)                 3 rows
    point-to-plane   r = n_a . (T(b) - c_a)       1 row
    plane-to-plane   r = n_a - R n_b              3 rows
    line-to-line     r = d_a - R d_b              3 rows

Jacobians are taken with respect to a left-multiplied increment
exp(xi) T with xi = (rho, phi); each update composes the increment onto
the current pose.  No step damping: the benchmark problems are
well-conditioned and the closed-form solvers remain the robust path.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SingularHessian
from ..geometry import Pose, se3_exp
from .base import SolverResult

# Condition-number estimate above which the normal matrix is rejected.
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class GnOptions:
    max_iterations: int = 50
    epsilon_step: float = 1e-10
    robust_delta: float | None = None

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.epsilon_step <= 0.0:
            raise ValueError("epsilon_step must be positive")


@dataclass(frozen=True)
class ResidualBlock:
    """Residual rows and 6-column Jacobian for one pairing."""

    kind: str
    residual: np.ndarray
    jacobian: np.ndarray
    weight: float


def _skew_batch(v):
    """(n, 3, 3) stack of skew matrices for the rows of v."""
    n = v.shape[0]
    out = np.zeros((n, 3, 3))
    out[:, 0, 1] = -v[:, 2]
    out[:, 0, 2] = v[:, 1]
    out[:, 1, 0] = v[:, 2]
    out[:, 1, 2] = -v[:, 0]
    out[:, 2, 0] = -v[:, 1]
    out[:, 2, 1] = v[:, 0]
    return out


def _assemble(pairings, rot, t):
    """Stacked residual vector, Jacobian, row weights, and block ids.

    Returns (r, jac, row_weight, block_sizes, kinds) where block_sizes and
    kinds describe consecutive per-kind groups for robust reweighting.
    """
    rows_r = []
    rows_j = []
    rows_w = []
    groups = []

    pts = pairings.points
    if len(pts):
        p = pts.b @ rot.T + t
        r = pts.a - p
        jac = np.zeros((len(pts), 3, 6))
        jac[:, 0, 0] = jac[:, 1, 1] = jac[:, 2, 2] = -1.0
        jac[:, :, 3:] = _skew_batch(p)
        rows_r.append(r.reshape(-1))
        rows_j.append(jac.reshape(-1, 6))
        rows_w.append(np.repeat(pts.weights, 3))
        groups.append(("point", len(pts), 3, pts.weights))

    pp = pairings.point_planes
    if len(pp):
        p = pp.b_point @ rot.T + t
        r = ((p - pp.a_centroid) * pp.a_normal).sum(axis=1)
        jac = np.empty((len(pp), 1, 6))
        jac[:, 0, :3] = pp.a_normal
        jac[:, 0, 3:] = np.cross(p, pp.a_normal)
        rows_r.append(r)
        rows_j.append(jac.reshape(-1, 6))
        rows_w.append(pp.weights)
        groups.append(("point_plane", len(pp), 1, pp.weights))

    planes = pairings.planes
    if len(planes):
        rn = planes.b_normal @ rot.T
        r = planes.a_normal - rn
        jac = np.zeros((len(planes), 3, 6))
        jac[:, :, 3:] = _skew_batch(rn)
        rows_r.append(r.reshape(-1))
        rows_j.append(jac.reshape(-1, 6))
        rows_w.append(np.repeat(planes.weights, 3))
        groups.append(("plane", len(planes), 3, planes.weights))

    lines = pairings.lines
    if len(lines):
        rd = lines.b_dir @ rot.T
        r = lines.a_dir - rd
        jac = np.zeros((len(lines), 3, 6))
        jac[:, :, 3:] = _skew_batch(rd)
        rows_r.append(r.reshape(-1))
        rows_j.append(jac.reshape(-1, 6))
        rows_w.append(np.repeat(lines.weights, 3))
        groups.append(("line", len(lines), 3, lines.weights))

    if not rows_r:
        return np.empty(0), np.empty((0, 6)), np.empty(0), groups
    return (
        np.concatenate(rows_r),
        np.concatenate(rows_j),
        np.concatenate(rows_w),
        groups,
    )


def residual_blocks(pairings, pose):
    """Per-pair residual blocks at the given pose (structured view)."""
    rot = pose.matrix()
    r, jac, _, groups = _assemble(pairings, rot, pose.t)
    blocks = []
    offset = 0
    for kind, count, rows, weights in groups:
        for i in range(count):
            sl = slice(offset + i * rows, offset + (i + 1) * rows)
            blocks.append(
                ResidualBlock(
                    kind=kind,
                    residual=r[sl].copy(),
                    jacobian=jac[sl].copy(),
                    weight=float(weights[i]),
                )
            )
        offset += count * rows
    return blocks


def _robust_row_factors(r, groups, delta):
    """Per-row Geman-McClure factors delta^2 / (delta^2 + |r_block|^2)."""
    factors = np.ones(r.shape[0])
    d2 = delta * delta
    offset = 0
    for _, count, rows, _ in groups:
        block = r[offset : offset + count * rows].reshape(count, rows)
        norm2 = (block * block).sum(axis=1)
        factors[offset : offset + count * rows] = np.repeat(
            d2 / (d2 + norm2), rows
        )
        offset += count * rows
    return factors


def solve_gn(pairings, initial, options=GnOptions()):
    """Iterate xi = -(J^T W J)^-1 J^T W r from the given initial pose.

    The caller is responsible for supplying an initial pose inside the
    convergence basin.  Raises SingularHessian when the normal matrix has
    an estimated condition number above MAX_CONDITION; hitting the
    iteration cap returns the last iterate with ``converged=False``.
    """
    pose = initial
    iterations = 0
    converged = False
    cost = 0.0
    for iterations in range(1, options.max_iterations + 1):
        rot = pose.matrix()
        r, jac, w, groups = _assemble(pairings, rot, pose.t)
        if options.robust_delta is not None:
            w = w * _robust_row_factors(r, groups, options.robust_delta)
        jw = jac * w[:, None]
        h = jac.T @ jw
        g = jw.T @ r
        cost = float(w @ (r * r))
        eigs = np.linalg.eigvalsh(h)
        if eigs[0] <= 0.0 or eigs[-1] / eigs[0] > MAX_CONDITION:
            raise SingularHessian(
                f"normal matrix condition estimate {eigs[-1] / max(eigs[0], 1e-300):.3e}"
            )
        step = -np.linalg.solve(h, g)
        pose = se3_exp(step).compose(pose)
        if float(np.linalg.norm(step)) < options.epsilon_step:
            converged = True
            break
    return SolverResult(
        pose=pose,
        inlier_point_indices=np.arange(len(pairings.points)),
        method="gn",
        iterations=iterations,
        converged=converged,
        final_cost=cost,
    )

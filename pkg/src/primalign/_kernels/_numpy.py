"""Pure numpy implementations of the hot kernels.

These mirror the compiled versions in ``_native.pyx`` operation for
operation; the test suite checks the two backends against each other.
"""
from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def cross_covariance(va, vb, w):
    """Weighted cross-covariance sum(w_i * vb_i va_i^T) and z = -sum(w_i vb_i x va_i).

    va, vb: (n, 3) float64 arrays, w: (n,) float64 array.
    Returns (B, z) with B a (3, 3) array and z a (3,) array.
    """
    wb = vb * w[:, None]
    b_mat = wb.T @ va
    z = -np.cross(wb, va).sum(axis=0)
    return b_mat, z


def scale_outlier_mask(a_local, b_local, s_t, min_norm=1e-9):
    """Flag pairs whose centroid-relative norms mismatch by a factor >= 1 + s_t.

    Pairs with either norm below ``min_norm`` are flagged too (the ratio is
    undefined there).  Returns a boolean (n,) mask, True = outlier.
    """
    na = np.sqrt((a_local * a_local).sum(axis=1))
    nb = np.sqrt((b_local * b_local).sum(axis=1))
    lo = np.minimum(na, nb)
    hi = np.maximum(na, nb)
    return (lo < min_norm) | (hi >= (1.0 + s_t) * lo)


def sym4_eigs(mat, tol=1e-12, max_sweeps=30):
    """Eigen-decomposition of a symmetric 4x4 matrix by cyclic Jacobi sweeps.

    Returns (values, vectors) with eigenvalues sorted descending and
    eigenvectors in matching columns.  Deterministic: fixed sweep order,
    fixed tolerance, no pivot searching.
    """
    a = np.array(mat, dtype=np.float64)
    v = np.eye(4)
    limit = tol * max(1.0, float(np.max(np.abs(a))))
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(3):
            for q in range(p + 1, 4):
                off = max(off, abs(a[p, q]))
        if off <= limit:
            break
        for p in range(3):
            for q in range(p + 1, 4):
                apq = a[p, q]
                if abs(apq) <= limit * 1e-4:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(4)
                rot[p, p] = c
                rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                v = v @ rot
    order = np.argsort(np.diag(a))[::-1]
    return np.diag(a)[order].copy(), v[:, order].copy()


def nn_brute(query, ref):
    """Exact nearest neighbour of each query row among the ref rows.

    Ties resolve to the lowest ref index.  Returns (indices, distances).
    """
    d2 = ((query[:, None, :] - ref[None, :, :]) ** 2).sum(axis=2)
    idx = d2.argmin(axis=1)
    dist = np.sqrt(d2[np.arange(len(query)), idx])
    return idx.astype(np.int64), dist

# cython: language_level=3
"""Compiled implementations of the hot kernels (see _numpy.py for the spec)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()

BACKEND = "native"


def cross_covariance(double[:, ::1] va, double[:, ::1] vb, double[::1] w):
    cdef Py_ssize_t n = va.shape[0]
    cdef Py_ssize_t i, r, c
    cdef double wi
    cdef double b[3][3]
    cdef double z[3]
    for r in range(3):
        z[r] = 0.0
        for c in range(3):
            b[r][c] = 0.0
    for i in range(n):
        wi = w[i]
        for r in range(3):
            for c in range(3):
                b[r][c] += wi * vb[i, r] * va[i, c]
        z[0] -= wi * (vb[i, 1] * va[i, 2] - vb[i, 2] * va[i, 1])
        z[1] -= wi * (vb[i, 2] * va[i, 0] - vb[i, 0] * va[i, 2])
        z[2] -= wi * (vb[i, 0] * va[i, 1] - vb[i, 1] * va[i, 0])
    b_out = np.empty((3, 3))
    z_out = np.empty(3)
    cdef double[:, ::1] bv = b_out
    cdef double[::1] zv = z_out
    for r in range(3):
        zv[r] = z[r]
        for c in range(3):
            bv[r, c] = b[r][c]
    return b_out, z_out


def scale_outlier_mask(double[:, ::1] a_local, double[:, ::1] b_local,
                       double s_t, double min_norm=1e-9):
    cdef Py_ssize_t n = a_local.shape[0]
    cdef Py_ssize_t i
    cdef double na, nb, lo, hi
    out = np.zeros(n, dtype=np.bool_)
    cdef cnp.uint8_t[::1] ov = out.view(np.uint8)
    for i in range(n):
        na = sqrt(a_local[i, 0] ** 2 + a_local[i, 1] ** 2 + a_local[i, 2] ** 2)
        nb = sqrt(b_local[i, 0] ** 2 + b_local[i, 1] ** 2 + b_local[i, 2] ** 2)
        if na < nb:
            lo = na
            hi = nb
        else:
            lo = nb
            hi = na
        if lo < min_norm or hi >= (1.0 + s_t) * lo:
            ov[i] = 1
    return out


def sym4_eigs(double[:, :] mat, double tol=1e-12, int max_sweeps=30):
    """Cyclic Jacobi on a symmetric 4x4; eigenvalues sorted descending."""
    cdef double a[4][4]
    cdef double v[4][4]
    cdef Py_ssize_t r, c, p, q, k, sweep
    cdef double limit, off, apq, theta, t, cs, sn, akp, akq, amax

    amax = 1.0
    for r in range(4):
        for c in range(4):
            a[r][c] = mat[r, c]
            v[r][c] = 1.0 if r == c else 0.0
            if fabs(mat[r, c]) > amax:
                amax = fabs(mat[r, c])
    limit = tol * amax

    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(3):
            for q in range(p + 1, 4):
                if fabs(a[p][q]) > off:
                    off = fabs(a[p][q])
        if off <= limit:
            break
        for p in range(3):
            for q in range(p + 1, 4):
                apq = a[p][q]
                if fabs(apq) <= limit * 1e-4:
                    continue
                theta = (a[q][q] - a[p][p]) / (2.0 * apq)
                t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                cs = 1.0 / sqrt(t * t + 1.0)
                sn = t * cs
                # rotate rows/columns p and q of a
                for k in range(4):
                    akp = a[k][p]
                    akq = a[k][q]
                    a[k][p] = cs * akp - sn * akq
                    a[k][q] = sn * akp + cs * akq
                for k in range(4):
                    akp = a[p][k]
                    akq = a[q][k]
                    a[p][k] = cs * akp - sn * akq
                    a[q][k] = sn * akp + cs * akq
                for k in range(4):
                    akp = v[k][p]
                    akq = v[k][q]
                    v[k][p] = cs * akp - sn * akq
                    v[k][q] = sn * akp + cs * akq

    vals = np.empty(4)
    vecs = np.empty((4, 4))
    cdef double[::1] valv = vals
    cdef double[:, ::1] vecv = vecs
    cdef Py_ssize_t order[4]
    cdef Py_ssize_t tmp, i, j
    for i in range(4):
        order[i] = i
    # insertion sort by descending eigenvalue, stable
    for i in range(1, 4):
        j = i
        while j > 0 and a[order[j - 1]][order[j - 1]] < a[order[j]][order[j]]:
            tmp = order[j - 1]
            order[j - 1] = order[j]
            order[j] = tmp
            j -= 1
    for i in range(4):
        valv[i] = a[order[i]][order[i]]
        for r in range(4):
            vecv[r, i] = v[r][order[i]]
    return vals, vecs


def nn_brute(double[:, ::1] query, double[:, ::1] ref):
    cdef Py_ssize_t nq = query.shape[0]
    cdef Py_ssize_t nr = ref.shape[0]
    cdef Py_ssize_t i, j, best
    cdef double d2, best_d2, dx, dy, dz
    idx = np.empty(nq, dtype=np.int64)
    dist = np.empty(nq)
    cdef cnp.int64_t[::1] iv = idx
    cdef double[::1] dv = dist
    for i in range(nq):
        best = 0
        best_d2 = 1e308
        for j in range(nr):
            dx = query[i, 0] - ref[j, 0]
            dy = query[i, 1] - ref[j, 1]
            dz = query[i, 2] - ref[j, 2]
            d2 = dx * dx + dy * dy + dz * dz
            if d2 < best_d2:
                best_d2 = d2
                best = j
        iv[i] = best
        dv[i] = sqrt(best_d2)
    return idx, dist

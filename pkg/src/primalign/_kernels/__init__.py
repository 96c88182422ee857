"""Hot numeric kernels with a compiled core and a pure-python fallback.

The Cython extension ``_native`` is built at install time; when it is
missing (or ``PRIMALIGN_PURE=1`` is set) the numpy implementations are
used instead.  Both expose the same four functions:

    cross_covariance(va, vb, w)      -> (B, z)
    scale_outlier_mask(a, b, s_t)    -> bool mask
    sym4_eigs(mat)                   -> (eigenvalues desc, eigenvector columns)
    nn_brute(query, ref)             -> (indices, distances)

``BACKEND`` names the active implementation ("native" or "numpy").
"""
from __future__ import annotations

import os

if os.environ.get("PRIMALIGN_PURE"):
    from . import _numpy as _impl
else:
    try:
        from . import _native as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _numpy as _impl

BACKEND = _impl.BACKEND
cross_covariance = _impl.cross_covariance
scale_outlier_mask = _impl.scale_outlier_mask
sym4_eigs = _impl.sym4_eigs
nn_brute = _impl.nn_brute

__all__ = [
    "BACKEND",
    "cross_covariance",
    "scale_outlier_mask",
    "sym4_eigs",
    "nn_brute",
]

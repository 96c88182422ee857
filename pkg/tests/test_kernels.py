"""Kernel backends: numpy reference behaviour and native/numpy parity."""
import numpy as np
import pytest

from primalign._kernels import _numpy as knp

try:
    from primalign._kernels import _native as knative
except ImportError:
    knative = None

BACKENDS = [knp] + ([knative] if knative is not None else [])


def _random_vectors(rng, n):
    va = rng.normal(size=(n, 3))
    vb = rng.normal(size=(n, 3))
    w = rng.uniform(0.1, 1.0, size=n)
    return np.ascontiguousarray(va), np.ascontiguousarray(vb), w


@pytest.mark.parametrize("kern", BACKENDS, ids=lambda k: k.BACKEND)
class TestAgainstIndependentReferences:
    def test_cross_covariance_matches_einsum(self, kern):
        rng = np.random.default_rng(0)
        va, vb, w = _random_vectors(rng, 57)
        b, z = kern.cross_covariance(va, vb, w)
        b_ref = np.einsum("i,ij,ik->jk", w, vb, va)
        z_ref = -np.einsum("i,ij->j", w, np.cross(vb, va))
        assert np.max(np.abs(b - b_ref)) < 1e-12
        assert np.max(np.abs(z - z_ref)) < 1e-12

    def test_scale_mask_matches_direct_formula(self, kern):
        rng = np.random.default_rng(1)
        a = rng.normal(size=(200, 3)) * rng.uniform(0.5, 2.0, size=(200, 1))
        b = rng.normal(size=(200, 3))
        a = np.ascontiguousarray(a)
        b = np.ascontiguousarray(b)
        got = kern.scale_outlier_mask(a, b, 0.2)
        na = np.linalg.norm(a, axis=1)
        nb = np.linalg.norm(b, axis=1)
        lo, hi = np.minimum(na, nb), np.maximum(na, nb)
        want = (lo < 1e-9) | (hi / np.maximum(lo, 1e-300) - 1.0 >= 0.2)
        assert np.array_equal(np.asarray(got, bool), want)

    def test_scale_mask_flags_tiny_norms(self, kern):
        a = np.ascontiguousarray([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
        b = np.ascontiguousarray([[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
        got = np.asarray(kern.scale_outlier_mask(a, b, 0.5), bool)
        assert got.tolist() == [True, False]

    def test_sym4_eigs_matches_lapack(self, kern):
        rng = np.random.default_rng(2)
        for _ in range(100):
            m = rng.normal(size=(4, 4))
            m = m + m.T
            vals, vecs = kern.sym4_eigs(np.ascontiguousarray(m))
            ref_vals, ref_vecs = np.linalg.eigh(m)
            assert np.max(np.abs(vals - ref_vals[::-1])) < 1e-9
            for col in range(4):
                ref = ref_vecs[:, 3 - col]
                got = vecs[:, col]
                # eigenvectors defined up to sign
                assert min(np.max(np.abs(got - ref)), np.max(np.abs(got + ref))) < 1e-7
            # reconstruction check
            assert np.max(np.abs(vecs @ np.diag(vals) @ vecs.T - m)) < 1e-9

    def test_nn_brute_matches_cdist(self, kern):
        from scipy.spatial.distance import cdist

        rng = np.random.default_rng(3)
        q = np.ascontiguousarray(rng.uniform(0, 10, size=(150, 3)))
        r = np.ascontiguousarray(rng.uniform(0, 10, size=(80, 3)))
        idx, dist = kern.nn_brute(q, r)
        d = cdist(q, r)
        assert np.array_equal(idx, d.argmin(axis=1))
        assert np.max(np.abs(dist - d.min(axis=1))) < 1e-12


@pytest.mark.skipif(knative is None, reason="compiled kernels not built")
class TestBackendParity:
    def test_cross_covariance_parity(self):
        rng = np.random.default_rng(4)
        va, vb, w = _random_vectors(rng, 333)
        b1, z1 = knp.cross_covariance(va, vb, w)
        b2, z2 = knative.cross_covariance(va, vb, w)
        assert np.max(np.abs(b1 - b2)) < 1e-12
        assert np.max(np.abs(z1 - z2)) < 1e-12

    def test_scale_mask_parity(self):
        rng = np.random.default_rng(5)
        a = np.ascontiguousarray(rng.normal(size=(500, 3)))
        b = np.ascontiguousarray(a * rng.uniform(0.8, 1.4, size=(500, 1)))
        m1 = np.asarray(knp.scale_outlier_mask(a, b, 0.2), bool)
        m2 = np.asarray(knative.scale_outlier_mask(a, b, 0.2), bool)
        assert np.array_equal(m1, m2)

    def test_sym4_parity(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            m = rng.normal(size=(4, 4))
            m = np.ascontiguousarray(m + m.T)
            v1, e1 = knp.sym4_eigs(m)
            v2, e2 = knative.sym4_eigs(m)
            assert np.max(np.abs(v1 - v2)) < 1e-10
            for col in range(4):
                assert min(
                    np.max(np.abs(e1[:, col] - e2[:, col])),
                    np.max(np.abs(e1[:, col] + e2[:, col])),
                ) < 1e-8

    def test_nn_parity(self):
        rng = np.random.default_rng(7)
        q = np.ascontiguousarray(rng.uniform(0, 5, size=(200, 3)))
        r = np.ascontiguousarray(rng.uniform(0, 5, size=(120, 3)))
        i1, d1 = knp.nn_brute(q, r)
        i2, d2 = knative.nn_brute(q, r)
        assert np.array_equal(i1, i2)
        assert np.max(np.abs(d1 - d2)) < 1e-12


def test_selected_backend_exposes_all_kernels():
    from primalign import _kernels

    assert _kernels.BACKEND in ("native", "numpy")
    for name in ("cross_covariance", "scale_outlier_mask", "sym4_eigs", "nn_brute"):
        assert callable(getattr(_kernels, name))

"""Optimal quaternion solver: examples, round trips, optimality."""
import math

import numpy as np
import pytest

from primalign import (
    DegenerateGeometry,
    GnOptions,
    PairingSet,
    PlanePairs,
    PointPairs,
    Pose,
    UnifiedVectors,
    build_horn_vectors,
    horn_rotation,
    quat_from_axis_angle,
    quat_to_matrix,
    rotation_error,
    solve_gn,
    solve_horn,
)
from primalign.geometry import random_quat


def uv_from_vectors(va, vb, w=None):
    va = np.ascontiguousarray(va, dtype=float)
    vb = np.ascontiguousarray(vb, dtype=float)
    n = va.shape[0]
    w = np.full(n, 1.0 / n) if w is None else np.asarray(w, float)
    return UnifiedVectors(
        va=va, vb=vb, weights=w,
        centroid_a=np.zeros(3), centroid_b=np.zeros(3),
        inlier_point_indices=np.arange(n), n_point_rows=n,
    )


def wahba_cost(rot, va, vb, w):
    return float(sum(wi * np.sum((a - rot @ b) ** 2) for wi, a, b in zip(w, va, vb)))


class TestHornRotation:
    def test_equal_vectors_give_identity(self):
        rng = np.random.default_rng(0)
        v = rng.normal(size=(6, 3))
        q = horn_rotation(uv_from_vectors(v, v))
        assert np.allclose(q, [1, 0, 0, 0], atol=1e-12)

    def test_rz30_round_trip(self):
        rng = np.random.default_rng(1)
        rot = quat_to_matrix(quat_from_axis_angle((0, 0, 1), math.radians(30)))
        vb = rng.normal(size=(10, 3))
        vb /= np.linalg.norm(vb, axis=1, keepdims=True)
        q = horn_rotation(uv_from_vectors(vb @ rot.T, vb))
        assert rotation_error(quat_to_matrix(q), rot) < 1e-10

    def test_180_degrees_has_no_singularity(self):
        rng = np.random.default_rng(2)
        rot = quat_to_matrix(quat_from_axis_angle((1, 0, 0), math.pi))
        vb = rng.normal(size=(5, 3))
        q = horn_rotation(uv_from_vectors(vb @ rot.T, vb))
        assert rotation_error(quat_to_matrix(q), rot) < 1e-10

    def test_parallel_vectors_degenerate(self):
        va = np.array([[1.0, 0, 0], [2.0, 0, 0]])
        with pytest.raises(DegenerateGeometry):
            horn_rotation(uv_from_vectors(va, va))

    def test_weight_scaling_invariance(self):
        rng = np.random.default_rng(3)
        rot = quat_to_matrix(random_quat(rng))
        vb = rng.normal(size=(8, 3))
        va = vb @ rot.T + rng.normal(0, 0.05, size=(8, 3))
        w = rng.uniform(0.5, 2.0, size=8)
        q1 = horn_rotation(uv_from_vectors(va, vb, w))
        q2 = horn_rotation(uv_from_vectors(va, vb, w * 37.5))
        assert np.max(np.abs(q1 - q2)) < 1e-12

    def test_cost_not_beaten_by_random_rotations(self):
        rng = np.random.default_rng(4)
        rot = quat_to_matrix(random_quat(rng))
        vb = rng.normal(size=(12, 3))
        va = vb @ rot.T + rng.normal(0, 0.3, size=(12, 3))
        w = rng.uniform(0.2, 1.0, size=12)
        q = horn_rotation(uv_from_vectors(va, vb, w))
        best = wahba_cost(quat_to_matrix(q), va, vb, w)
        for _ in range(10_000):
            trial = wahba_cost(quat_to_matrix(random_quat(rng)), va, vb, w)
            assert best <= trial + 1e-12


class TestSolveHorn:
    def test_identity_input_gives_identity_pose(self):
        rng = np.random.default_rng(5)
        pts = rng.uniform(0, 50, size=(20, 3))
        res = solve_horn(PairingSet(points=PointPairs(pts, pts)))
        assert rotation_error(res.pose.matrix(), np.eye(3)) < 1e-12
        assert np.max(np.abs(res.pose.t)) < 1e-10
        assert res.method == "horn"
        assert res.iterations == 0

    def test_noise_free_round_trip_in_cube(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            b = rng.uniform(0, 50, size=(30, 3))
            gt = Pose(random_quat(rng), rng.uniform(0, 50, size=3))
            res = solve_horn(PairingSet(points=PointPairs(gt.apply(b), b)))
            assert rotation_error(res.pose.matrix(), gt.matrix()) < 1e-10
            assert np.linalg.norm(res.pose.t - gt.t) < 1e-9

    def test_single_point_and_two_orthogonal_planes(self):
        rng = np.random.default_rng(7)
        gt = Pose(random_quat(rng), rng.uniform(0, 50, size=3))
        b_pt = rng.uniform(0, 50, size=(1, 3))
        normals_b = np.array([[1.0, 0, 0], [0, 1.0, 0]])
        planes = PlanePairs(
            a_centroid=gt.apply(rng.uniform(0, 50, (2, 3))),
            a_normal=normals_b @ gt.matrix().T,
            b_centroid=rng.uniform(0, 50, (2, 3)),
            b_normal=normals_b,
        )
        pairings = PairingSet(points=PointPairs(gt.apply(b_pt), b_pt), planes=planes)
        res = solve_horn(pairings)
        assert rotation_error(res.pose.matrix(), gt.matrix()) < 1e-10
        assert np.linalg.norm(res.pose.t - gt.t) < 1e-9

    def test_matches_gauss_newton_from_ground_truth(self):
        rng = np.random.default_rng(8)
        b = rng.uniform(0, 50, size=(40, 3))
        gt = Pose(random_quat(rng), rng.uniform(0, 50, size=3))
        pairings = PairingSet(points=PointPairs(gt.apply(b), b))
        horn = solve_horn(pairings)
        gn = solve_gn(pairings, gt, GnOptions())
        assert rotation_error(horn.pose.matrix(), gn.pose.matrix()) < 1e-7
        assert np.linalg.norm(horn.pose.t - gn.pose.t) < 1e-7

    def test_outlier_rejection_restores_exactness(self):
        rng = np.random.default_rng(9)
        b = rng.uniform(0, 50, size=(100, 3))
        gt = Pose(random_quat(rng), rng.uniform(0, 50, size=3))
        a = gt.apply(b)
        bad = rng.choice(100, size=10, replace=False)
        a[bad] += rng.normal(size=(10, 3)) * 400.0
        res = solve_horn(PairingSet(points=PointPairs(a, b)), s_t=0.2)
        assert rotation_error(res.pose.matrix(), gt.matrix()) < 1e-9
        assert np.linalg.norm(res.pose.t - gt.t) < 1e-8
        assert set(bad.tolist()).isdisjoint(res.inlier_point_indices.tolist())

"""ICP pipeline: matching oracles, robust weights, alignment loops."""
import math

import numpy as np
import pytest

from primalign import (
    IcpParams,
    InvalidThreshold,
    MetricMap,
    NoCorrespondences,
    Pose,
    icp_align,
    match_planes,
    match_points,
    quat_from_axis_angle,
    robust_weight,
    rotation_error,
)
from primalign._kernels import nn_brute
from primalign.bench import fallback_model
from primalign.geometry import random_quat


class TestMatchPoints:
    def test_identical_clouds_self_match(self):
        rng = np.random.default_rng(0)
        pts = rng.uniform(0, 10, size=(50, 3))
        m = MetricMap(pts)
        matches = match_points(m, MetricMap(pts.copy()), Pose.identity(), 1.0)
        assert len(matches) == 50
        assert np.array_equal(matches.a_indices, matches.b_indices)
        assert np.max(matches.distances) == 0.0

    def test_distance_gate_rejects_far_points(self):
        map_a = MetricMap([[0.0, 0, 0], [1.0, 0, 0]])
        map_b = MetricMap([[0.1, 0, 0], [50.0, 0, 0]])
        matches = match_points(map_a, map_b, Pose.identity(), 0.5)
        assert matches.b_indices.tolist() == [0]

    def test_kdtree_equals_brute_force(self):
        rng = np.random.default_rng(1)
        a = np.ascontiguousarray(rng.uniform(0, 20, size=(1000, 3)))
        b = np.ascontiguousarray(rng.uniform(0, 20, size=(1000, 3)))
        pose = Pose(random_quat(rng), rng.uniform(0, 5, 3))
        matches = match_points(MetricMap(a), MetricMap(b), pose, np.inf)
        idx, dist = nn_brute(np.ascontiguousarray(pose.apply(b)), a)
        assert np.array_equal(matches.a_indices, idx)
        assert np.max(np.abs(matches.distances - dist)) < 1e-12

    def test_one_to_many_allowed(self):
        map_a = MetricMap([[0.0, 0, 0], [10.0, 0, 0]])
        map_b = MetricMap([[0.1, 0, 0], [-0.1, 0, 0]])
        matches = match_points(map_a, map_b, Pose.identity(), 1.0)
        assert matches.a_indices.tolist() == [0, 0]


class TestMatchPlanes:
    @staticmethod
    def _map(rng, n, rotate_normals=None):
        c = rng.uniform(0, 10, size=(n, 3))
        nrm = rng.normal(size=(n, 3))
        nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)
        if rotate_normals is not None:
            nrm = nrm @ rotate_normals.T
        return MetricMap(points=None, planes=(c, nrm))

    def test_identical_sets_all_paired(self):
        rng = np.random.default_rng(2)
        m = self._map(rng, 12)
        other = MetricMap(planes=(m.plane_centroids.copy(), m.plane_normals.copy()))
        matches = match_planes(m, other, Pose.identity(), 0.35)
        assert len(matches) == 12
        assert np.array_equal(matches.a_indices, matches.b_indices)

    def test_normal_gate_rejects(self):
        c = np.array([[0.0, 0, 0]])
        map_a = MetricMap(planes=(c, np.array([[0.0, 0, 1.0]])))
        tilted = np.array([[math.sin(0.6), 0.0, math.cos(0.6)]])
        map_b = MetricMap(planes=(c.copy(), tilted))
        assert len(match_planes(map_a, map_b, Pose.identity(), 0.35)) == 0
        assert len(match_planes(map_a, map_b, Pose.identity(), 0.7)) == 1

    def test_brute_force_agreement(self):
        rng = np.random.default_rng(3)
        map_a = self._map(rng, 40)
        map_b = self._map(rng, 25)
        pose = Pose(random_quat(rng), rng.uniform(0, 2, 3))
        matches = match_planes(map_a, map_b, pose, 0.5)
        # oracle: exhaustive nearest centroid + angle gate
        moved_c = pose.apply(map_b.plane_centroids)
        moved_n = pose.rotate(map_b.plane_normals)
        expected = []
        for j in range(25):
            d = np.linalg.norm(map_a.plane_centroids - moved_c[j], axis=1)
            i = int(d.argmin())
            cosang = float(np.clip(map_a.plane_normals[i] @ moved_n[j], -1, 1))
            if math.acos(cosang) <= 0.5:
                expected.append((i, j))
        assert list(zip(matches.a_indices.tolist(), matches.b_indices.tolist())) == expected


class TestRobustWeight:
    def test_zero_residual_gives_one(self):
        assert robust_weight(0.0, 2.0) == 1.0

    def test_residual_equal_delta_gives_half(self):
        assert abs(robust_weight(1.5, 1.5) - 0.5) < 1e-15

    def test_monotone_decreasing_and_bounded(self):
        rng = np.random.default_rng(4)
        r = np.sort(rng.uniform(0, 100, size=200))
        w = robust_weight(r, 3.0)
        assert np.all(np.diff(w) <= 0)
        assert np.all((w > 0) & (w <= 1))
        assert np.all(w[r > 0] < 1.0)

    def test_invalid_delta(self):
        with pytest.raises(InvalidThreshold):
            robust_weight(1.0, 0.0)


class TestIcpAlign:
    def test_self_alignment_converges_in_one_iteration(self):
        rng = np.random.default_rng(5)
        pts = rng.uniform(0, 10, size=(200, 3))
        m = MetricMap(pts)
        res = icp_align(m, MetricMap(pts.copy()), Pose.identity(), IcpParams())
        assert res.converged
        assert res.iterations == 1
        assert rotation_error(res.pose.matrix(), np.eye(3)) < 1e-12

    def test_recovers_small_perturbation(self):
        rng = np.random.default_rng(6)
        model = MetricMap(fallback_model(n=800, seed=3))
        for seed in range(3):
            trial_rng = np.random.default_rng(seed)
            q = quat_from_axis_angle(trial_rng.normal(size=3), math.radians(15.0))
            gt = Pose(q, trial_rng.uniform(-0.2, 0.2, size=3))
            map_b = model.transformed(gt.inverse())
            res = icp_align(model, map_b, Pose.identity(),
                            IcpParams(max_point_pair_distance=0.5, convergence_epsilon=1e-9))
            assert res.converged
            assert rotation_error(res.pose.matrix(), gt.matrix()) < 1e-3
            assert np.linalg.norm(res.pose.t - gt.t) < 1e-3

    def test_large_flip_reported_honestly(self):
        # 180-degree flip is far outside the association basin: the result
        # must either fail to converge or report a large remaining error
        model = MetricMap(fallback_model(n=500, seed=4))
        gt = Pose(quat_from_axis_angle((0, 0, 1), math.pi), np.zeros(3))
        map_b = model.transformed(gt.inverse())
        res = icp_align(model, map_b, Pose.identity(),
                        IcpParams(max_point_pair_distance=2.0, max_iterations=40))
        err = rotation_error(res.pose.matrix(), gt.matrix())
        assert (not res.converged) or err > 0.1

    def test_bit_deterministic_under_fixed_inputs(self):
        rng = np.random.default_rng(7)
        model = MetricMap(fallback_model(n=400, seed=5))
        q = quat_from_axis_angle(rng.normal(size=3), 0.2)
        gt = Pose(q, rng.uniform(-0.1, 0.1, 3))
        map_b = model.transformed(gt.inverse())
        params = IcpParams(max_point_pair_distance=0.5, seed=11)
        r1 = icp_align(model, map_b, Pose.identity(), params)
        r2 = icp_align(MetricMap(model.points.copy()),
                       MetricMap(map_b.points.copy()), Pose.identity(), params)
        assert np.array_equal(r1.pose.q, r2.pose.q)
        assert np.array_equal(r1.pose.t, r2.pose.t)
        assert r1.delta_trace == r2.delta_trace

    def test_mean_residual_non_increasing_on_self_alignment(self):
        rng = np.random.default_rng(8)
        model = MetricMap(fallback_model(n=500, seed=6))
        q = quat_from_axis_angle(rng.normal(size=3), 0.15)
        gt = Pose(q, rng.uniform(-0.1, 0.1, 3))
        map_b = model.transformed(gt.inverse())
        means = []
        for cap in range(1, 7):
            res = icp_align(model, map_b, Pose.identity(),
                            IcpParams(max_point_pair_distance=1.0, max_iterations=cap))
            matches = match_points(model, map_b, res.pose, np.inf)
            means.append(float(matches.distances.mean()))
        for earlier, later in zip(means, means[1:]):
            assert later <= earlier + 1e-12

    def test_no_correspondences_raises(self):
        map_a = MetricMap([[0.0, 0, 0], [1.0, 0, 0]])
        map_b = MetricMap([[100.0, 0, 0], [101.0, 0, 0]])
        with pytest.raises(NoCorrespondences):
            icp_align(map_a, map_b, Pose.identity(),
                      IcpParams(max_point_pair_distance=1.0))

    def test_planes_participate_in_alignment(self):
        rng = np.random.default_rng(9)
        pts = rng.uniform(0, 10, size=(60, 3))
        normals = rng.normal(size=(30, 3))
        normals /= np.linalg.norm(normals, axis=1, keepdims=True)
        centroids = rng.uniform(0, 10, size=(30, 3))
        map_a = MetricMap(pts, planes=(centroids, normals))
        gt = Pose(quat_from_axis_angle(rng.normal(size=3), 0.1),
                  rng.uniform(-0.3, 0.3, 3))
        map_b = map_a.transformed(gt.inverse())
        res = icp_align(map_a, map_b, Pose.identity(),
                        IcpParams(max_point_pair_distance=5.0))
        assert res.converged
        assert res.plane_pairs > 0
        assert rotation_error(res.pose.matrix(), gt.matrix()) < 1e-6

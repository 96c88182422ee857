"""Iterative closest point/primitive alignment between two maps.

Each round matches primitives of the map being aligned against the
reference map under the current pose estimate (nearest-neighbour KD-tree
queries for points, nearest-centroid with a normal-angle gate for
planes), optionally down-weights pairs with a robust loss, hands the
pairings to one of the optimal-transformation solvers, and repeats until
the pose update is negligible.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import InvalidThreshold, NoCorrespondences
from .geometry import Pose, rotation_angle
from .pairings import PairingSet, PlanePairs, PointPairs
from .solvers import GnOptions, solve_gn, solve_horn, solve_olae


class MetricMap:
    """Points plus optional planes/lines, with a lazy spatial index.

    ``planes`` and ``lines`` are (centroids, normals) / (points,
    directions) array pairs.  The map is immutable after construction;
    the KD-tree is built on first use and shared across queries.
    """

    def __init__(self, points=None, planes=None, lines=None):
        self.points = (
            np.zeros((0, 3)) if points is None
            else np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 3)
        )
        self.plane_centroids, self.plane_normals = self._pair(planes)
        self.line_points, self.line_dirs = self._pair(lines)
        self._tree = None
        self._plane_tree = None

    @staticmethod
    def _pair(arrays):
        if arrays is None:
            return np.zeros((0, 3)), np.zeros((0, 3))
        first = np.asarray(arrays[0], dtype=np.float64).reshape(-1, 3)
        second = np.asarray(arrays[1], dtype=np.float64).reshape(-1, 3)
        if first.shape != second.shape:
            raise ValueError("primitive array pair must have matching shapes")
        return first, second

    @property
    def n_points(self):
        return self.points.shape[0]

    @property
    def n_planes(self):
        return self.plane_centroids.shape[0]

    def point_index(self):
        if self._tree is None:
            self._tree = cKDTree(self.points)
        return self._tree

    def plane_index(self):
        if self._plane_tree is None:
            self._plane_tree = cKDTree(self.plane_centroids)
        return self._plane_tree

    def transformed(self, pose):
        """A copy of the map with every primitive moved by the pose."""
        planes = None
        if self.n_planes:
            planes = (pose.apply(self.plane_centroids), pose.rotate(self.plane_normals))
        lines = None
        if self.line_points.shape[0]:
            lines = (pose.apply(self.line_points), pose.rotate(self.line_dirs))
        return MetricMap(pose.apply(self.points), planes, lines)

    def median_nn_spacing(self):
        """Median distance between a point and its nearest other point."""
        if self.n_points < 2:
            return 0.0
        d, _ = self.point_index().query(self.points, k=2)
        return float(np.median(d[:, 1]))


@dataclass(frozen=True)
class Matches:
    """Correspondences found by one matching round."""

    a_indices: np.ndarray
    b_indices: np.ndarray
    distances: np.ndarray

    def __len__(self):
        return self.a_indices.shape[0]


@dataclass(frozen=True)
class IcpParams:
    """Iteration controls, matching gates, and the solver selection.

    ``max_point_pair_distance=None`` means twice the median NN spacing of
    the reference map, computed when the alignment starts.  The robust
    loss only engages when ``trust_initial_guess`` is set: residual-based
    weighting is meaningless without a reasonable starting pose.
    """

    max_iterations: int = 60
    convergence_epsilon: float = 1e-6
    max_point_pair_distance: float | None = None
    plane_normal_max_angle: float = 0.35
    solver: str = "horn"
    s_t: float | None = None
    robust_delta: float | None = None
    trust_initial_guess: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.convergence_epsilon <= 0.0:
            raise ValueError("convergence_epsilon must be positive")
        if self.max_point_pair_distance is not None and self.max_point_pair_distance <= 0.0:
            raise ValueError("max_point_pair_distance must be positive")
        if not 0.0 < self.plane_normal_max_angle <= np.pi / 2:
            raise ValueError("plane_normal_max_angle must be in (0, pi/2]")
        if self.solver not in ("horn", "olae", "gn"):
            raise ValueError(f"unknown solver {self.solver!r}")


@dataclass(frozen=True)
class IcpResult:
    pose: Pose
    iterations: int
    converged: bool
    point_pairs: int
    plane_pairs: int
    delta_trace: tuple[float, ...] = field(default_factory=tuple)


def match_points(map_a, map_b, pose, max_dist):
    """Nearest reference point for every b-point under the pose.

    Each b-point transforms by the pose and queries map_a's KD-tree; the
    pair is kept when the distance is within ``max_dist``.  Several
    b-points may share one a-point.
    """
    if map_b.n_points == 0 or map_a.n_points == 0:
        return Matches(np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0))
    moved = pose.apply(map_b.points)
    dist, idx = map_a.point_index().query(moved)
    keep = np.flatnonzero(dist <= max_dist)
    return Matches(idx[keep].astype(np.int64), keep.astype(np.int64), dist[keep])


def match_planes(map_a, map_b, pose, normal_max_angle):
    """Nearest-centroid plane pairs whose normals agree within the gate."""
    if map_b.n_planes == 0 or map_a.n_planes == 0:
        return Matches(np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0))
    moved_c = pose.apply(map_b.plane_centroids)
    moved_n = pose.rotate(map_b.plane_normals)
    dist, idx = map_a.plane_index().query(moved_c)
    cosines = (map_a.plane_normals[idx] * moved_n).sum(axis=1)
    angles = np.arccos(np.clip(cosines, -1.0, 1.0))
    keep = np.flatnonzero(angles <= normal_max_angle)
    return Matches(idx[keep].astype(np.int64), keep.astype(np.int64), dist[keep])


def robust_weight(residual_norm, delta):
    """Geman-McClure weight delta^2 / (delta^2 + r^2), in (0, 1]."""
    if delta <= 0.0:
        raise InvalidThreshold(f"robust delta must be positive, got {delta}")
    d2 = delta * delta
    return d2 / (d2 + np.square(residual_norm))


def _solve(pairings, pose, params):
    if params.solver == "horn":
        return solve_horn(pairings, s_t=params.s_t)
    if params.solver == "olae":
        return solve_olae(pairings, s_t=params.s_t)
    opts = GnOptions(
        max_iterations=25,
        epsilon_step=1e-12,
        robust_delta=params.robust_delta if params.trust_initial_guess else None,
    )
    return solve_gn(pairings, pose, opts)


def icp_align(map_a, map_b, initial, params=IcpParams()):
    """Align map_b onto map_a starting from the initial pose.

    Returns the pose p with map_a ~ p(map_b).  Raises NoCorrespondences
    when a matching round leaves the solver without a single point pair.
    """
    max_dist = params.max_point_pair_distance
    if max_dist is None:
        spacing = map_a.median_nn_spacing()
        max_dist = 2.0 * spacing if spacing > 0.0 else np.inf

    pose = initial
    trace = []
    converged = False
    pts = planes = None
    iterations = 0
    for iterations in range(1, params.max_iterations + 1):
        pts = match_points(map_a, map_b, pose, max_dist)
        planes = match_planes(map_a, map_b, pose, params.plane_normal_max_angle)
        if len(pts) == 0:
            raise NoCorrespondences(
                f"iteration {iterations}: no point pairs within {max_dist:.4g}"
            )

        point_w = None
        plane_w = None
        if params.trust_initial_guess and params.robust_delta is not None:
            point_w = robust_weight(pts.distances, params.robust_delta)
            if len(planes):
                moved_n = pose.rotate(map_b.plane_normals[planes.b_indices])
                cosines = (map_a.plane_normals[planes.a_indices] * moved_n).sum(axis=1)
                plane_w = robust_weight(
                    np.arccos(np.clip(cosines, -1.0, 1.0)), params.robust_delta
                )

        plane_pairs = None
        if len(planes):
            plane_pairs = PlanePairs(
                a_centroid=map_a.plane_centroids[planes.a_indices],
                a_normal=map_a.plane_normals[planes.a_indices],
                b_centroid=map_b.plane_centroids[planes.b_indices],
                b_normal=map_b.plane_normals[planes.b_indices],
                weights=plane_w,
            )
        pairings = PairingSet(
            points=PointPairs(
                map_a.points[pts.a_indices],
                map_b.points[pts.b_indices],
                weights=point_w,
            ),
            planes=plane_pairs,
        )

        result = _solve(pairings, pose, params)
        delta = result.pose.compose(pose.inverse())
        delta_norm = rotation_angle(delta.matrix()) + float(np.linalg.norm(delta.t))
        trace.append(delta_norm)
        pose = result.pose
        if delta_norm < params.convergence_epsilon:
            converged = True
            break

    return IcpResult(
        pose=pose,
        iterations=iterations,
        converged=converged,
        point_pairs=len(pts),
        plane_pairs=len(planes),
        delta_trace=tuple(trace),
    )

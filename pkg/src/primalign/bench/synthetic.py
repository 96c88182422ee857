"""Synthetic scene generation for the benchmark experiments.

A base set of points / plane centroids / line anchors is drawn uniformly
in the cube (0,0,0)-(50,50,50) as the frame-b observations; the frame-a
side is the base set moved by a random ground-truth pose.  Gaussian noise
corrupts the transformed side: additive isotropic noise on points, and
normal/director perturbations by random-axis rotations whose angle is
|N(0, sigma)|.  Gross point outliers replace transformed-side points with
fresh uniform draws in the (optionally scaled) cube.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry import Pose, random_quat
from ..pairings import LinePairs, PairingSet, PlanePairs, PointPairs

CUBE_SIZE = 50.0


@dataclass(frozen=True)
class SyntheticScene:
    pairings: PairingSet
    gt_pose: Pose
    point_outlier_indices: np.ndarray


def random_pose(rng, cube=CUBE_SIZE):
    """Uniform random rotation, translation uniform in the cube."""
    return Pose(random_quat(rng), rng.uniform(0.0, cube, size=3))


def _random_units(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _perturb_directions(rng, dirs, sigma):
    """Rotate each unit row about a uniform random axis by |N(0, sigma)|."""
    if sigma <= 0.0 or dirs.shape[0] == 0:
        return dirs
    axes = _random_units(rng, dirs.shape[0])
    angles = np.abs(rng.normal(0.0, sigma, size=dirs.shape[0]))
    cos = np.cos(angles)[:, None]
    sin = np.sin(angles)[:, None]
    # Rodrigues formula applied row-wise
    cross = np.cross(axes, dirs)
    dot = (axes * dirs).sum(axis=1)[:, None]
    out = dirs * cos + cross * sin + axes * dot * (1.0 - cos)
    return out / np.linalg.norm(out, axis=1, keepdims=True)


def gen_synthetic_scene(
    n_points,
    n_planes=0,
    n_lines=0,
    sigma=0.0,
    outlier_ratio=0.0,
    outlier_scale=1.0,
    seed=0,
    rng=None,
):
    """Scene of paired primitives plus the pose that generated them.

    The returned ground truth maps frame b to frame a (a_i = T(b_i) up to
    noise).  Exactly floor(outlier_ratio * n_points) point pairs are
    replaced by gross outliers.  Deterministic for a given seed.
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    gt = random_pose(rng)
    rot = gt.matrix()

    pts_b = rng.uniform(0.0, CUBE_SIZE, size=(n_points, 3))
    pts_a = pts_b @ rot.T + gt.t
    if sigma > 0.0:
        pts_a = pts_a + rng.normal(0.0, sigma, size=pts_a.shape)

    n_out = int(outlier_ratio * n_points)
    outlier_idx = np.sort(rng.choice(n_points, size=n_out, replace=False)) if n_out else np.empty(0, np.int64)
    if n_out:
        pts_a[outlier_idx] = rng.uniform(0.0, CUBE_SIZE * outlier_scale, size=(n_out, 3))

    planes = None
    if n_planes:
        cent_b = rng.uniform(0.0, CUBE_SIZE, size=(n_planes, 3))
        normals_b = _random_units(rng, n_planes)
        cent_a = cent_b @ rot.T + gt.t
        normals_a = _perturb_directions(rng, normals_b @ rot.T, sigma)
        planes = PlanePairs(cent_a, normals_a, cent_b, normals_b)

    lines = None
    if n_lines:
        anchor_b = rng.uniform(0.0, CUBE_SIZE, size=(n_lines, 3))
        dirs_b = _random_units(rng, n_lines)
        anchor_a = anchor_b @ rot.T + gt.t
        dirs_a = _perturb_directions(rng, dirs_b @ rot.T, sigma)
        lines = LinePairs(anchor_a, dirs_a, anchor_b, dirs_b)

    pairings = PairingSet(
        points=PointPairs(pts_a, pts_b),
        planes=planes,
        lines=lines,
    )
    return SyntheticScene(pairings, gt, outlier_idx.astype(np.int64))


def fallback_model(n=2000, seed=0):
    """Built-in stand-in point cloud for the ICP benchmark.

    Three overlapping ellipsoid shells of distinct size plus a flat slab,
    arranged asymmetrically so self-registration has a unique basin.
    Returns an (n, 3) array with a bounding box close to the unit cube.
    """
    rng = np.random.default_rng(seed)
    lobes = (
        (0.50, np.array([0.42, 0.38, 0.30]), np.array([0.40, 0.40, 0.32])),
        (0.25, np.array([0.22, 0.16, 0.14]), np.array([0.78, 0.62, 0.55])),
        (0.15, np.array([0.06, 0.06, 0.22]), np.array([0.88, 0.78, 0.80])),
    )
    parts = []
    for frac, radii, center in lobes:
        m = int(round(frac * n))
        parts.append(_random_units(rng, m) * radii + center)
    m = n - sum(p.shape[0] for p in parts)
    slab = np.column_stack(
        [
            rng.uniform(0.1, 0.9, size=m),
            rng.uniform(0.05, 0.45, size=m),
            np.full(m, 0.02) + rng.normal(0.0, 0.004, size=m),
        ]
    )
    parts.append(slab)
    return np.concatenate(parts)

"""Matched primitive pairs and their conversion to common vector lists.

Point, line, and plane correspondences all reduce to pairs of 3-vectors:
points become centroid-relative local coordinates, lines contribute their
unit directors, planes their unit normals.  The quaternion solver consumes
the raw local vectors; the linear attitude solver additionally normalizes
the point-derived ones so every entry is a unit vector.  Either list feeds
a rotation-only estimator, with the translation recovered afterwards from
the (inlier) point centroids.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import (
    DegenerateGeometry,
    DegenerateViewpoint,
    EmptyPointSet,
    InvalidThreshold,
)
from .geometry import Line

# Point-derived local vectors shorter than this carry no direction
# information and cannot be normalized; they are dropped from the vector
# lists (the pair still counts toward the centroids).
ZERO_NORM = 1e-9


def _rows3(a, name):
    out = np.asarray(a, dtype=np.float64)
    if out.size == 0:
        return out.reshape(0, 3)
    out = out.reshape(-1, 3)
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} must be finite")
    return out


def _weights(w, n, name):
    if w is None:
        return np.ones(n)
    out = np.asarray(w, dtype=np.float64).reshape(-1)
    if out.shape[0] != n:
        raise ValueError(f"{name}: expected {n} weights, got {out.shape[0]}")
    if np.any(out <= 0.0) or not np.all(np.isfinite(out)):
        raise ValueError(f"{name}: weights must be positive and finite")
    return out


def _unit_rows(v, name):
    v = _rows3(v, name)
    norms = np.linalg.norm(v, axis=1)
    if v.shape[0] and np.any(np.abs(norms - 1.0) > 1e-9):
        v = v / norms[:, None]
    return v


@dataclass(frozen=True)
class PointPairs:
    """Index-aligned point correspondences a[i] <-> b[i] with weights."""

    a: np.ndarray
    b: np.ndarray
    weights: np.ndarray = None

    def __post_init__(self):
        a = _rows3(self.a, "point a")
        b = _rows3(self.b, "point b")
        if a.shape != b.shape:
            raise ValueError("point pair arrays must have matching shapes")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "weights", _weights(self.weights, a.shape[0], "points"))

    def __len__(self):
        return self.a.shape[0]


@dataclass(frozen=True)
class LinePairs:
    """Line correspondences: anchors plus unit directors for each side."""

    a_point: np.ndarray
    a_dir: np.ndarray
    b_point: np.ndarray
    b_dir: np.ndarray
    weights: np.ndarray = None

    def __post_init__(self):
        ap = _rows3(self.a_point, "line a point")
        ad = _unit_rows(self.a_dir, "line a dir")
        bp = _rows3(self.b_point, "line b point")
        bd = _unit_rows(self.b_dir, "line b dir")
        if not (ap.shape == ad.shape == bp.shape == bd.shape):
            raise ValueError("line pair arrays must have matching shapes")
        for name, v in (("a_point", ap), ("a_dir", ad), ("b_point", bp), ("b_dir", bd)):
            object.__setattr__(self, name, v)
        object.__setattr__(self, "weights", _weights(self.weights, ap.shape[0], "lines"))

    def __len__(self):
        return self.a_dir.shape[0]


@dataclass(frozen=True)
class PlanePairs:
    """Plane correspondences: representative centroids plus unit normals."""

    a_centroid: np.ndarray
    a_normal: np.ndarray
    b_centroid: np.ndarray
    b_normal: np.ndarray
    weights: np.ndarray = None

    def __post_init__(self):
        ac = _rows3(self.a_centroid, "plane a centroid")
        an = _unit_rows(self.a_normal, "plane a normal")
        bc = _rows3(self.b_centroid, "plane b centroid")
        bn = _unit_rows(self.b_normal, "plane b normal")
        if not (ac.shape == an.shape == bc.shape == bn.shape):
            raise ValueError("plane pair arrays must have matching shapes")
        for name, v in (("a_centroid", ac), ("a_normal", an),
                        ("b_centroid", bc), ("b_normal", bn)):
            object.__setattr__(self, name, v)
        object.__setattr__(self, "weights", _weights(self.weights, ac.shape[0], "planes"))

    def __len__(self):
        return self.a_normal.shape[0]


@dataclass(frozen=True)
class PointPlanePairs:
    """Point-in-b to plane-in-a pairings (iterative solver only)."""

    b_point: np.ndarray
    a_centroid: np.ndarray
    a_normal: np.ndarray
    weights: np.ndarray = None

    def __post_init__(self):
        bp = _rows3(self.b_point, "pp b point")
        ac = _rows3(self.a_centroid, "pp a centroid")
        an = _unit_rows(self.a_normal, "pp a normal")
        if not (bp.shape == ac.shape == an.shape):
            raise ValueError("point-plane pair arrays must have matching shapes")
        object.__setattr__(self, "b_point", bp)
        object.__setattr__(self, "a_centroid", ac)
        object.__setattr__(self, "a_normal", an)
        object.__setattr__(self, "weights", _weights(self.weights, bp.shape[0], "point-planes"))

    def __len__(self):
        return self.b_point.shape[0]


@dataclass(frozen=True)
class PairingSet:
    """All correspondences between two frames, grouped per primitive kind."""

    points: PointPairs = None
    lines: LinePairs = None
    planes: PlanePairs = None
    point_planes: PointPlanePairs = None

    def __post_init__(self):
        if self.points is None:
            object.__setattr__(self, "points", PointPairs(np.empty((0, 3)), np.empty((0, 3))))
        if self.lines is None:
            object.__setattr__(self, "lines", LinePairs(*[np.empty((0, 3))] * 4))
        if self.planes is None:
            object.__setattr__(self, "planes", PlanePairs(*[np.empty((0, 3))] * 4))
        if self.point_planes is None:
            object.__setattr__(self, "point_planes", PointPlanePairs(*[np.empty((0, 3))] * 3))

    @property
    def n_points(self):
        return len(self.points)

    @property
    def total(self):
        return (len(self.points) + len(self.lines) + len(self.planes)
                + len(self.point_planes))


@dataclass(frozen=True)
class UnifiedVectors:
    """Vector-pair lists shared by the rotation solvers.

    Rows are ordered points, then lines, then planes; ``n_point_rows``
    counts the point-derived prefix.  ``inlier_point_indices`` indexes the
    original point pairs that survived outlier rejection (all of them when
    no threshold was given); the centroids are weighted over exactly those
    pairs.
    """

    va: np.ndarray
    vb: np.ndarray
    weights: np.ndarray
    centroid_a: np.ndarray
    centroid_b: np.ndarray
    inlier_point_indices: np.ndarray
    n_point_rows: int = 0

    def __len__(self):
        return self.va.shape[0]


def weighted_centroids(points, weights=None):
    """Weighted centroids (c_a, c_b) of the point pairs.

    Raises EmptyPointSet when there are no point pairs; the translation is
    unobservable without at least one.
    """
    if isinstance(points, PointPairs):
        a, b, w = points.a, points.b, points.weights
    else:
        a = _rows3(points[0], "points a")
        b = _rows3(points[1], "points b")
        w = _weights(weights, a.shape[0], "points")
    if a.shape[0] == 0:
        raise EmptyPointSet("at least one point pair is required")
    total = w.sum()
    return (w[:, None] * a).sum(axis=0) / total, (w[:, None] * b).sum(axis=0) / total


def detect_scale_outliers(points, centroids, s_t):
    """Indices of point pairs whose centroid-relative norms mismatch.

    A pair is flagged when max(|va|,|vb|) / min(|va|,|vb|) - 1 >= s_t,
    with the per-pair vectors taken relative to the given centroids.
    Pairs where either norm is below ``ZERO_NORM`` are flagged as well
    (their ratio is undefined).
    """
    if s_t <= 0.0:
        raise InvalidThreshold(f"s_t must be positive, got {s_t}")
    c_a, c_b = centroids
    mask = _kernels.scale_outlier_mask(
        np.ascontiguousarray(points.a - c_a),
        np.ascontiguousarray(points.b - c_b),
        float(s_t),
        ZERO_NORM,
    )
    return np.flatnonzero(mask)


def _inlier_centroids(points, keep):
    return weighted_centroids(
        PointPairs(points.a[keep], points.b[keep], points.weights[keep])
    )


def _detect_two_pass(points, s_t):
    """Outlier indices after one centroid-recomputation round.

    First pass flags against the centroids of all pairs; the second pass
    recomputes the centroids over the surviving pairs and re-runs the test
    once (not iterated to a fixpoint).
    """
    idx = np.arange(len(points))
    centroids = weighted_centroids(points)
    outliers = detect_scale_outliers(points, centroids, s_t)
    if outliers.size == len(points):
        raise EmptyPointSet("every point pair was flagged as a scale outlier")
    if outliers.size == 0:
        return outliers, centroids
    centroids = _inlier_centroids(points, np.setdiff1d(idx, outliers, assume_unique=True))
    second = detect_scale_outliers(points, centroids, s_t)
    if second.size < len(points):
        outliers = second
    keep = np.setdiff1d(idx, outliers, assume_unique=True)
    return outliers, _inlier_centroids(points, keep)


def _build_unified(pairings, s_t, normalize_points, kind_scales):
    points = pairings.points
    if len(points) == 0:
        raise EmptyPointSet("at least one point pair is required")

    if s_t is not None:
        outliers, (c_a, c_b) = _detect_two_pass(points, s_t)
        inliers = np.setdiff1d(np.arange(len(points)), outliers, assume_unique=True)
    else:
        c_a, c_b = weighted_centroids(points)
        inliers = np.arange(len(points))

    va_pts = points.a[inliers] - c_a
    vb_pts = points.b[inliers] - c_b
    norms_a = np.linalg.norm(va_pts, axis=1)
    norms_b = np.linalg.norm(vb_pts, axis=1)
    keep = (norms_a >= ZERO_NORM) & (norms_b >= ZERO_NORM)
    va_pts, vb_pts = va_pts[keep], vb_pts[keep]
    w_pts = points.weights[inliers][keep]
    if normalize_points and va_pts.shape[0]:
        va_pts = va_pts / norms_a[keep][:, None]
        vb_pts = vb_pts / norms_b[keep][:, None]

    scale_pts, scale_lines, scale_planes = kind_scales
    parts_a = [va_pts]
    parts_b = [vb_pts]
    parts_w = [w_pts * scale_pts]
    if len(pairings.lines):
        parts_a.append(pairings.lines.a_dir)
        parts_b.append(pairings.lines.b_dir)
        parts_w.append(pairings.lines.weights * scale_lines)
    if len(pairings.planes):
        parts_a.append(pairings.planes.a_normal)
        parts_b.append(pairings.planes.b_normal)
        parts_w.append(pairings.planes.weights * scale_planes)

    va = np.ascontiguousarray(np.concatenate(parts_a))
    vb = np.ascontiguousarray(np.concatenate(parts_b))
    w = np.concatenate(parts_w)
    if va.shape[0] < 2:
        raise DegenerateGeometry(
            f"need at least 2 direction vectors to observe the rotation, "
            f"got {va.shape[0]}"
        )
    w = w / w.sum()

    # rotation is unobservable when all the va directions are parallel
    ua = va / np.linalg.norm(va, axis=1)[:, None]
    if np.max(np.linalg.norm(np.cross(ua[:1], ua[1:]), axis=1)) < 1e-9:
        raise DegenerateGeometry("all direction vectors are parallel")

    return UnifiedVectors(
        va=va,
        vb=vb,
        weights=w,
        centroid_a=c_a,
        centroid_b=c_b,
        inlier_point_indices=inliers,
        n_point_rows=int(va_pts.shape[0]),
    )


def build_horn_vectors(pairings, s_t=None, kind_scales=(1.0, 1.0, 1.0)):
    """Local vector lists for the quaternion solver.

    Point pairs contribute centroid-relative vectors, line pairs their
    unit directors, plane pairs their unit normals.  When ``s_t`` is given,
    scale-mismatch outliers are removed first and the centroids recomputed
    over the survivors.  Per-kind weight scales are applied before the
    weights are normalized to sum one.
    """
    return _build_unified(pairings, s_t, normalize_points=False,
                          kind_scales=kind_scales)


def build_olae_unit_vectors(pairings, s_t=None, kind_scales=(1.0, 1.0, 1.0)):
    """Unit-vector lists for the linear attitude solver.

    Same construction as :func:`build_horn_vectors` except point-derived
    vectors are normalized to unit length; directors and normals pass
    through unchanged.
    """
    return _build_unified(pairings, s_t, normalize_points=True,
                          kind_scales=kind_scales)


def canonicalize_line_direction(line, viewpoint):
    """Flip the director, if needed, toward the viewpoint's side.

    The canonical director makes an angle below 90 degrees with the unit
    vector from the viewpoint to the line's representative point.  (The
    ray to the line's *closest* point is perpendicular to the director by
    construction, so it cannot break the ambiguity.)  Exact 90-degree
    cases keep the director as given.  Raises DegenerateViewpoint when
    the viewpoint lies on the line, where no side is defined.
    """
    vp = np.asarray(viewpoint, dtype=np.float64).reshape(3)
    rel = vp - line.point
    perp = rel - (rel @ line.direction) * line.direction
    if float(np.linalg.norm(perp)) < 1e-12:
        raise DegenerateViewpoint("viewpoint lies on the line")
    ray = line.point - vp
    ray = ray / np.linalg.norm(ray)
    dot = float(line.direction @ ray)
    if abs(dot) <= 1e-12:
        return line
    if dot < 0.0:
        return Line(line.point, -line.direction)
    return line

"""Rotations, rigid transforms, and the geometric primitives they act on.

Conventions used throughout the package:

- Quaternions are float64 arrays ``(w, x, y, z)`` with unit norm and the
  scalar part canonicalized to ``w >= 0`` (fixes the double cover so error
  metrics and tests are deterministic).
- A :class:`Pose` maps frame-b coordinates into frame a: ``p_a = R p_b + t``.
- se(3) tangent vectors are ``(rho, phi)``: translation part first,
  rotation part last, so ``se3_exp([0,0,0, 0,0,theta])`` is a pure
  z-rotation.
- The Gibbs (Rodrigues) vector is ``axis * tan(angle/2)``; it cannot
  represent rotations of exactly 180 degrees.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def _as_vec3(v, name="vector"):
    out = np.asarray(v, dtype=np.float64).reshape(3)
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} must have finite components, got {out}")
    return out


def unit(v):
    """Return v normalized to unit length; raises on (near-)zero input."""
    v = _as_vec3(v)
    n = float(np.linalg.norm(v))
    if n < 1e-15:
        raise ValueError("cannot normalize a zero vector")
    return v / n


def skew(v):
    """Skew-symmetric matrix [v]_x with [v]_x u = v x u."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


# ---------------------------------------------------------------------------
# Quaternions (w, x, y, z)
# ---------------------------------------------------------------------------

def quat_canonical(q):
    """Normalize and flip sign so the scalar part is non-negative."""
    q = np.asarray(q, dtype=np.float64).reshape(4)
    q = q / np.linalg.norm(q)
    if q[0] < 0.0:
        q = -q
    return q


def quat_multiply(q1, q2):
    """Hamilton product; satisfies R(q1 q2) = R(q1) R(q2)."""
    w1, x1, y1, z1 = q1
    w2, x2, y2, z2 = q2
    return np.array(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ]
    )


def quat_conjugate(q):
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_to_matrix(q):
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def quat_from_matrix(rot):
    """Quaternion of a rotation matrix (Shepperd's max-diagonal method)."""
    m = np.asarray(rot, dtype=np.float64)
    tr = m[0, 0] + m[1, 1] + m[2, 2]
    cand = np.array([tr, m[0, 0], m[1, 1], m[2, 2]])
    case = int(np.argmax(cand))
    if case == 0:
        s = math.sqrt(tr + 1.0) * 2.0
        q = np.array(
            [0.25 * s, (m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s,
             (m[1, 0] - m[0, 1]) / s]
        )
    elif case == 1:
        s = math.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2.0
        q = np.array(
            [(m[2, 1] - m[1, 2]) / s, 0.25 * s, (m[0, 1] + m[1, 0]) / s,
             (m[0, 2] + m[2, 0]) / s]
        )
    elif case == 2:
        s = math.sqrt(1.0 - m[0, 0] + m[1, 1] - m[2, 2]) * 2.0
        q = np.array(
            [(m[0, 2] - m[2, 0]) / s, (m[0, 1] + m[1, 0]) / s, 0.25 * s,
             (m[1, 2] + m[2, 1]) / s]
        )
    else:
        s = math.sqrt(1.0 - m[0, 0] - m[1, 1] + m[2, 2]) * 2.0
        q = np.array(
            [(m[1, 0] - m[0, 1]) / s, (m[0, 2] + m[2, 0]) / s,
             (m[1, 2] + m[2, 1]) / s, 0.25 * s]
        )
    return quat_canonical(q)


def quat_from_axis_angle(axis, angle):
    axis = unit(axis)
    half = 0.5 * float(angle)
    return quat_canonical(
        np.concatenate([[math.cos(half)], math.sin(half) * axis])
    )


def quat_from_gibbs(g):
    """Unit quaternion for a Gibbs vector: w = 1/sqrt(1+|g|^2), xyz = w*g."""
    g = _as_vec3(g, "gibbs vector")
    w = 1.0 / math.sqrt(1.0 + float(g @ g))
    return quat_canonical(np.concatenate([[w], w * g]))


def gibbs_from_quat(q):
    """Inverse of quat_from_gibbs; undefined at 180 degrees (w = 0)."""
    q = quat_canonical(q)
    if q[0] < 1e-12:
        raise ValueError("Gibbs vector is undefined at 180 degree rotations")
    return q[1:] / q[0]


def random_quat(rng):
    """Uniform random rotation as a quaternion (normalized 4-normal)."""
    q = rng.normal(size=4)
    return quat_canonical(q)


# ---------------------------------------------------------------------------
# SO(3) exp / log and error metrics
# ---------------------------------------------------------------------------

def so3_exp(phi):
    """Rotation matrix for a rotation vector (Rodrigues formula)."""
    phi = _as_vec3(phi)
    angle = float(np.linalg.norm(phi))
    if angle < 1e-12:
        k = skew(phi)
        return np.eye(3) + k + 0.5 * (k @ k)
    k = skew(phi / angle)
    return np.eye(3) + math.sin(angle) * k + (1.0 - math.cos(angle)) * (k @ k)


def so3_log(rot):
    """Rotation vector of a rotation matrix.

    Goes through the quaternion so the axis extraction stays well
    conditioned near 180 degrees; at exactly 180 degrees a valid vector on
    the +/- ambiguous axis is returned.
    """
    q = quat_from_matrix(rot)
    vec_norm = float(np.linalg.norm(q[1:]))
    if vec_norm < 1e-15:
        return np.zeros(3)
    angle = 2.0 * math.atan2(vec_norm, q[0])
    return (angle / vec_norm) * q[1:]


def rotation_angle(rot):
    """Angle of a rotation matrix in [0, pi], precise near both ends."""
    m = np.asarray(rot, dtype=np.float64)
    s = 0.5 * np.array(
        [m[2, 1] - m[1, 2], m[0, 2] - m[2, 0], m[1, 0] - m[0, 1]]
    )
    c = 0.5 * (m[0, 0] + m[1, 1] + m[2, 2] - 1.0)
    sin_n = float(np.linalg.norm(s))
    if c < 0.0 and sin_n < 1e-4:
        # near pi the skew part vanishes; recover the angle via the axis
        return float(np.linalg.norm(so3_log(m)))
    return math.atan2(sin_n, c)


def rotation_error(r_est, r_gt):
    """Geodesic distance ||log(R_gt^T R_est)|| in radians, in [0, pi]."""
    r_est = np.asarray(r_est, dtype=np.float64)
    r_gt = np.asarray(r_gt, dtype=np.float64)
    return rotation_angle(r_gt.T @ r_est)


# ---------------------------------------------------------------------------
# Pose = rotation + translation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Pose:
    """Rigid transform p_a = R p_b + t, stored as unit quaternion + vector."""

    q: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", quat_canonical(self.q))
        object.__setattr__(self, "t", _as_vec3(self.t, "translation"))

    @staticmethod
    def identity():
        return Pose(np.array([1.0, 0.0, 0.0, 0.0]), np.zeros(3))

    @staticmethod
    def from_matrix(rot, t=(0.0, 0.0, 0.0)):
        return Pose(quat_from_matrix(rot), t)

    def matrix(self):
        """Rotation as a 3x3 orthonormal matrix."""
        return quat_to_matrix(self.q)

    def as_matrix4(self):
        m = np.eye(4)
        m[:3, :3] = self.matrix()
        m[:3, 3] = self.t
        return m

    def apply(self, points):
        """Transform one point (3,) or a batch (n, 3)."""
        p = np.asarray(points, dtype=np.float64)
        return p @ self.matrix().T + self.t

    def rotate(self, vectors):
        """Rotate directions without translating them."""
        v = np.asarray(vectors, dtype=np.float64)
        return v @ self.matrix().T

    def compose(self, other):
        """self after other: (self * other)(p) = self(other(p))."""
        return Pose(
            quat_multiply(self.q, other.q), self.rotate(other.t) + self.t
        )

    def inverse(self):
        qc = quat_conjugate(self.q)
        return Pose(qc, -(quat_to_matrix(qc) @ self.t))


# ---------------------------------------------------------------------------
# SE(3) exp / log
# ---------------------------------------------------------------------------

def _so3_left_jacobian(phi):
    angle = float(np.linalg.norm(phi))
    k = skew(phi)
    if angle < 1e-8:
        return np.eye(3) + 0.5 * k + (k @ k) / 6.0
    a2 = angle * angle
    return (
        np.eye(3)
        + ((1.0 - math.cos(angle)) / a2) * k
        + ((angle - math.sin(angle)) / (a2 * angle)) * (k @ k)
    )


def _so3_left_jacobian_inv(phi):
    angle = float(np.linalg.norm(phi))
    k = skew(phi)
    if angle < 1e-8:
        return np.eye(3) - 0.5 * k + (k @ k) / 12.0
    half = 0.5 * angle
    cot_term = (1.0 - half * math.cos(half) / math.sin(half)) / (angle * angle)
    return np.eye(3) - 0.5 * k + cot_term * (k @ k)


def se3_exp(xi):
    """Pose for a 6-vector tangent (rho, phi); inverse of se3_log below pi."""
    xi = np.asarray(xi, dtype=np.float64).reshape(6)
    rho, phi = xi[:3], xi[3:]
    rot = so3_exp(phi)
    t = _so3_left_jacobian(phi) @ rho
    return Pose(quat_from_matrix(rot), t)


def se3_log(pose):
    """Tangent 6-vector (rho, phi) of a pose; guarded near 180 degrees."""
    phi = so3_log(pose.matrix())
    rho = _so3_left_jacobian_inv(phi) @ pose.t
    return np.concatenate([rho, phi])


# ---------------------------------------------------------------------------
# Lines and planes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Line:
    """Infinite line through ``point`` along the unit ``direction``."""

    point: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", _as_vec3(self.point, "line point"))
        object.__setattr__(self, "direction", unit(self.direction))


@dataclass(frozen=True)
class Plane:
    """Plane given by a representative ``centroid`` and unit ``normal``."""

    centroid: np.ndarray
    normal: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "centroid", _as_vec3(self.centroid, "centroid"))
        object.__setattr__(self, "normal", unit(self.normal))


def transform_line(pose, line):
    return Line(pose.apply(line.point), pose.rotate(line.direction))


def transform_plane(pose, plane):
    return Plane(pose.apply(plane.centroid), pose.rotate(plane.normal))


def transform_primitive(pose, primitive):
    """Transform a point (array), Line, or Plane by a pose."""
    if isinstance(primitive, Line):
        return transform_line(pose, primitive)
    if isinstance(primitive, Plane):
        return transform_plane(pose, primitive)
    return pose.apply(primitive)

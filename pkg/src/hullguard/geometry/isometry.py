"""Rigid transforms as unit quaternion + translation.

Quaternions are stored scalar-first (w, x, y, z), Hamilton convention.
Constructors renormalize, so the unit-norm invariant (within 1e-9) holds for
every instance; composition therefore cannot drift over long kinematic chains.
"""
from __future__ import annotations

import numpy as np

from ..errors import ParameterError

_EPS = 1e-12


def cross3(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cross product of two 3-vectors (avoids np.cross's axis machinery)."""
    return np.array([
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])


def quat_multiply(q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    w1, x1, y1, z1 = q1
    w2, x2, y2, z2 = q2
    return np.array([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ])


def quat_conjugate(q: np.ndarray) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate vector v by unit quaternion q (uses the expanded 15-mul form)."""
    w, ux, uy, uz = q
    vx, vy, vz = v[0], v[1], v[2]
    cx = uy * vz - uz * vy
    cy = uz * vx - ux * vz
    cz = ux * vy - uy * vx
    return np.array([
        vx + 2.0 * (w * cx + uy * cz - uz * cy),
        vy + 2.0 * (w * cy + uz * cx - ux * cz),
        vz + 2.0 * (w * cz + ux * cy - uy * cx),
    ])


def quat_from_axis_angle(axis: np.ndarray, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis)
    if n < _EPS:
        raise ParameterError("rotation axis must be non-zero")
    half = 0.5 * angle
    return np.concatenate(([np.cos(half)], np.sin(half) / n * axis))


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def quat_to_axis_angle(q: np.ndarray) -> np.ndarray:
    """Rotation vector (axis * angle) of q, shortest arc, angle in [0, pi]."""
    q = np.asarray(q, dtype=float)
    if q[0] < 0.0:
        q = -q
    sin_half = np.linalg.norm(q[1:])
    cos_half = min(q[0], 1.0)
    angle = 2.0 * np.arctan2(sin_half, cos_half)
    if sin_half < _EPS:
        return q[1:] * 2.0
    return q[1:] / sin_half * angle


class Isometry:
    """Rigid transform: x_world = R(q) x_local + t."""

    __slots__ = ("q", "t")

    def __init__(self, q=(1.0, 0.0, 0.0, 0.0), t=(0.0, 0.0, 0.0)):
        q = np.asarray(q, dtype=float)
        t = np.asarray(t, dtype=float)
        if q.shape != (4,) or t.shape != (3,):
            raise ParameterError("isometry needs a wxyz quaternion and 3-vector translation")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(t))):
            raise ParameterError("isometry components must be finite")
        n = np.linalg.norm(q)
        if n < 1e-9:
            raise ParameterError("quaternion norm too small to normalize")
        self.q = q / n
        self.t = t.copy()

    @classmethod
    def _raw(cls, q: np.ndarray, t: np.ndarray) -> "Isometry":
        """Construction without validation for values already known unit/finite
        (kinematic hot loops). q is renormalized cheaply to stop drift."""
        out = object.__new__(cls)
        out.q = q / np.sqrt(q @ q)
        out.t = t
        return out

    @classmethod
    def identity(cls) -> "Isometry":
        return cls()

    @classmethod
    def from_translation(cls, t) -> "Isometry":
        return cls((1.0, 0.0, 0.0, 0.0), t)

    @classmethod
    def from_axis_angle(cls, axis, angle: float, t=(0.0, 0.0, 0.0)) -> "Isometry":
        return cls(quat_from_axis_angle(np.asarray(axis, float), angle), t)

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "Isometry":
        m = np.asarray(m, dtype=float)
        r = m[:3, :3]
        # Shepperd's method, branch on the largest diagonal combination.
        tr = np.trace(r)
        if tr > 0:
            s = np.sqrt(tr + 1.0) * 2
            q = np.array([0.25 * s,
                          (r[2, 1] - r[1, 2]) / s,
                          (r[0, 2] - r[2, 0]) / s,
                          (r[1, 0] - r[0, 1]) / s])
        elif r[0, 0] >= r[1, 1] and r[0, 0] >= r[2, 2]:
            s = np.sqrt(1.0 + r[0, 0] - r[1, 1] - r[2, 2]) * 2
            q = np.array([(r[2, 1] - r[1, 2]) / s,
                          0.25 * s,
                          (r[0, 1] + r[1, 0]) / s,
                          (r[0, 2] + r[2, 0]) / s])
        elif r[1, 1] >= r[2, 2]:
            s = np.sqrt(1.0 + r[1, 1] - r[0, 0] - r[2, 2]) * 2
            q = np.array([(r[0, 2] - r[2, 0]) / s,
                          (r[0, 1] + r[1, 0]) / s,
                          0.25 * s,
                          (r[1, 2] + r[2, 1]) / s])
        else:
            s = np.sqrt(1.0 + r[2, 2] - r[0, 0] - r[1, 1]) * 2
            q = np.array([(r[1, 0] - r[0, 1]) / s,
                          (r[0, 2] + r[2, 0]) / s,
                          (r[1, 2] + r[2, 1]) / s,
                          0.25 * s])
        return cls(q, m[:3, 3])

    def rotation_matrix(self) -> np.ndarray:
        return quat_to_matrix(self.q)

    def matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = quat_to_matrix(self.q)
        m[:3, 3] = self.t
        return m

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Transform one 3-vector or an (N, 3) array of points."""
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            return quat_rotate(self.q, points) + self.t
        return points @ quat_to_matrix(self.q).T + self.t

    def rotate(self, v: np.ndarray) -> np.ndarray:
        return quat_rotate(self.q, np.asarray(v, dtype=float))

    def compose(self, other: "Isometry") -> "Isometry":
        """self then other applied on top:  (self * other)(x) = self(other(x))."""
        return Isometry._raw(quat_multiply(self.q, other.q),
                             quat_rotate(self.q, other.t) + self.t)

    def __mul__(self, other: "Isometry") -> "Isometry":
        return self.compose(other)

    def inverse(self) -> "Isometry":
        qc = quat_conjugate(self.q)
        return Isometry(qc, -quat_rotate(qc, self.t))

    def to_dict(self) -> dict:
        return {"xyz": [float(v) for v in self.t],
                "quat_wxyz": [float(v) for v in self.q]}

    @classmethod
    def from_dict(cls, d: dict) -> "Isometry":
        return cls(d.get("quat_wxyz", (1.0, 0.0, 0.0, 0.0)), d.get("xyz", (0.0, 0.0, 0.0)))

    def __repr__(self) -> str:
        return f"Isometry(q={self.q.round(6).tolist()}, t={self.t.round(6).tolist()})"

"""Core geometric value types: point clouds, triangle meshes, capsules.

All coordinates are meters, float64. Meshes produced by the hull pipeline are
watertight and convex; :meth:`TriangleMesh.validate_watertight` and
:meth:`TriangleMesh.validate_convex` implement exactly those invariants.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import GeometryError, ParameterError, TopologyError
from .isometry import Isometry

CONVEXITY_TOL = 1e-6


def _as_points(points, name: str = "points") -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        return arr.reshape(0, 3)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ParameterError(f"{name} must be an (N, 3) array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} must be finite")
    return arr


@dataclass
class PointCloud:
    """Ordered set of 3D points with optional unit normals and a frame tag.

    ``degenerate`` marks points whose normal could not be estimated (fewer
    than 3 neighbors in the search radius); it is only set by
    :func:`estimate_normals`.
    """

    points: np.ndarray
    normals: np.ndarray | None = None
    frame: str = "camera"
    degenerate: np.ndarray | None = None

    def __post_init__(self):
        self.points = _as_points(self.points)
        if self.normals is not None:
            self.normals = np.asarray(self.normals, dtype=float).reshape(-1, 3)
            if len(self.normals) != len(self.points):
                raise ParameterError("normals must match points in length")
            norms = np.linalg.norm(self.normals, axis=1)
            if len(norms) and np.max(np.abs(norms - 1.0)) > 1e-6:
                raise ParameterError("normals must be unit length within 1e-6")

    def __len__(self) -> int:
        return len(self.points)

    def select(self, indices) -> "PointCloud":
        indices = np.asarray(indices)
        return PointCloud(
            self.points[indices],
            None if self.normals is None else self.normals[indices],
            self.frame,
            None if self.degenerate is None else self.degenerate[indices],
        )

    def transformed(self, iso: Isometry, frame: str) -> "PointCloud":
        normals = None
        if self.normals is not None:
            normals = self.normals @ iso.rotation_matrix().T
        return PointCloud(iso.apply(self.points), normals, frame, self.degenerate)


@dataclass
class TriangleMesh:
    """Indexed triangle mesh. Hull outputs carry outward-oriented windings."""

    vertices: np.ndarray
    triangles: np.ndarray
    frame: str = "world"

    def __post_init__(self):
        self.vertices = _as_points(self.vertices, "vertices")
        self.triangles = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        if len(self.triangles):
            if self.triangles.min() < 0 or self.triangles.max() >= len(self.vertices):
                raise ParameterError("triangle indices out of range")

    def num_triangles(self) -> int:
        return len(self.triangles)

    def edge_counts(self) -> dict[tuple[int, int], int]:
        counts: dict[tuple[int, int], int] = {}
        for i, j, k in self.triangles:
            for a, b in ((i, j), (j, k), (k, i)):
                key = (int(min(a, b)), int(max(a, b)))
                counts[key] = counts.get(key, 0) + 1
        return counts

    def is_watertight(self) -> bool:
        if len(self.triangles) < 4:
            return False
        return all(c == 2 for c in self.edge_counts().values())

    def validate_watertight(self):
        if not self.is_watertight():
            raise TopologyError("mesh is not watertight (an edge is not shared by exactly 2 triangles)")

    def face_normals(self) -> tuple[np.ndarray, np.ndarray]:
        """Unit normals from winding and plane offsets b with n.x = b on the face."""
        v = self.vertices
        t = self.triangles
        n = np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])
        lengths = np.linalg.norm(n, axis=1)
        lengths[lengths == 0] = 1.0
        n = n / lengths[:, None]
        b = np.einsum("ij,ij->i", n, v[t[:, 0]])
        return n, b

    def is_convex(self, tol: float = CONVEXITY_TOL) -> bool:
        if not len(self.triangles):
            return False
        n, b = self.face_normals()
        # every vertex on the inner side of every face plane, winding outward
        return bool(np.max(self.vertices @ n.T - b[None, :]) <= tol)

    def validate_convex(self, tol: float = CONVEXITY_TOL):
        if not self.is_convex(tol):
            raise GeometryError("mesh is not convex with outward winding")

    def contains(self, points: np.ndarray, tol: float = 1e-7) -> np.ndarray:
        """Per-point containment test against the face planes (convex meshes)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        n, b = self.face_normals()
        return np.max(points @ n.T - b[None, :], axis=1) <= tol

    def volume(self) -> float:
        """Signed volume via the divergence theorem; positive for outward winding."""
        v = self.vertices
        t = self.triangles
        return float(np.einsum("ij,ij->", v[t[:, 0]], np.cross(v[t[:, 1]], v[t[:, 2]]))) / 6.0

    def vertex_centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def bounding_radius(self) -> tuple[np.ndarray, float]:
        c = self.vertex_centroid()
        return c, float(np.max(np.linalg.norm(self.vertices - c, axis=1)))

    def transformed(self, iso: Isometry, frame: str) -> "TriangleMesh":
        return TriangleMesh(iso.apply(self.vertices), self.triangles.copy(), frame)

    def to_dict(self) -> dict:
        return {
            "vertices": [[float(x) for x in row] for row in self.vertices],
            "triangles": [[int(x) for x in row] for row in self.triangles],
            "frame": self.frame,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TriangleMesh":
        return cls(np.asarray(d["vertices"], dtype=float),
                   np.asarray(d["triangles"], dtype=np.int64),
                   d.get("frame", "world"))


@dataclass
class Capsule:
    """Sphere-swept segment; coincident endpoints make a sphere."""

    endpoint_a: np.ndarray
    endpoint_b: np.ndarray
    radius: float

    def __post_init__(self):
        self.endpoint_a = np.asarray(self.endpoint_a, dtype=float).reshape(3)
        self.endpoint_b = np.asarray(self.endpoint_b, dtype=float).reshape(3)
        self.radius = float(self.radius)
        if not (np.all(np.isfinite(self.endpoint_a)) and np.all(np.isfinite(self.endpoint_b))):
            raise ParameterError("capsule endpoints must be finite")
        if not np.isfinite(self.radius) or self.radius <= 0:
            raise ParameterError("capsule radius must be positive")

    def transformed(self, iso: Isometry) -> "Capsule":
        return Capsule(iso.apply(self.endpoint_a), iso.apply(self.endpoint_b), self.radius)

    def to_dict(self) -> dict:
        return {"a": [float(x) for x in self.endpoint_a],
                "b": [float(x) for x in self.endpoint_b],
                "r": self.radius}

    @classmethod
    def from_dict(cls, d: dict) -> "Capsule":
        return cls(np.asarray(d["a"], float), np.asarray(d["b"], float), float(d["r"]))

"""Convex hulls and uniform mesh scaling."""
from __future__ import annotations

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from ..errors import DegenerateGeometryError, ParameterError
from .types import TriangleMesh

PLANE_TOL = 1e-9


def classify_degeneracy(points: np.ndarray) -> str | None:
    """Return the degeneracy mode of a point set, or None if full rank.

    Modes: "too-few-points" (< 4), "collinear" (all points within PLANE_TOL of
    a line, a single point included), "coplanar".
    """
    points = np.asarray(points, dtype=float)
    if len(points) < 4:
        return "too-few-points"
    centered = points - points.mean(axis=0)
    # max orthogonal deviation from the best-fit line / plane via the SVD frame
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    coords = centered @ vt.T
    off_line = np.linalg.norm(coords[:, 1:], axis=1).max()
    if off_line <= PLANE_TOL:
        return "collinear"
    off_plane = np.abs(coords[:, 2]).max()
    if off_plane <= PLANE_TOL:
        return "coplanar"
    return None


def convex_hull(points, frame: str = "world") -> TriangleMesh:
    """Watertight, outward-wound triangulated convex hull of a point set.

    Raises DegenerateGeometryError naming the failure mode for inputs that do
    not span 3D (within a 1e-9 plane tolerance).
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or (points.size and points.shape[1] != 3):
        raise ParameterError("convex_hull expects an (N, 3) point array")
    mode = classify_degeneracy(points) if len(points) else "too-few-points"
    if mode is not None:
        raise DegenerateGeometryError(mode)
    try:
        hull = ConvexHull(points)
    except QhullError as exc:  # pragma: no cover - SVD pre-check should catch first
        raise DegenerateGeometryError("coplanar", f"qhull failed: {exc}") from exc

    # compact to hull vertices only and orient windings outward
    keep = hull.vertices
    remap = np.full(len(points), -1, dtype=np.int64)
    remap[keep] = np.arange(len(keep))
    vertices = points[keep]
    triangles = remap[hull.simplices]
    outward = hull.equations[:, :3]
    v = vertices
    winding = np.einsum(
        "ij,ij->i",
        np.cross(v[triangles[:, 1]] - v[triangles[:, 0]], v[triangles[:, 2]] - v[triangles[:, 0]]),
        outward,
    )
    flip = winding < 0
    triangles[flip] = triangles[flip][:, [0, 2, 1]]
    return TriangleMesh(vertices, triangles, frame)


def scale_about_centroid(mesh: TriangleMesh, s: float) -> TriangleMesh:
    """Uniform scaling of vertices about the vertex centroid; connectivity kept."""
    if not np.isfinite(s) or s <= 0:
        raise ParameterError(f"scale factor must be positive, got {s}")
    c = mesh.vertex_centroid()
    return TriangleMesh(c + s * (mesh.vertices - c), mesh.triangles.copy(), mesh.frame)

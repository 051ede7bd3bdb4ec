"""Point cloud to inflated convex collision mesh.

Fixed stage order: coarse voxel downsample, normal estimation, density
clustering to isolate the dominant blob, fine voxel downsample, convex hull,
triangle-budget decimation, safety inflation about the centroid, then a rigid
transform from camera frame into the world. Every stage is deterministic, so
the whole pipeline is reproducible byte-for-byte for a fixed input cloud.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ParameterError, TooSparseError
from ..geometry import (
    Isometry,
    PointCloud,
    TriangleMesh,
    convex_hull,
    dbscan_largest_cluster,
    decimate,
    estimate_normals,
    scale_about_centroid,
    select_normal_radius,
    voxel_downsample,
)


@dataclass
class PipelineParams:
    leaf_coarse: float = 0.02
    leaf_fine: float = 0.01
    cluster_eps: float = 0.10
    cluster_min_pts: int = 50
    max_triangles: int = 5000
    safety_scale: float = 1.05

    def __post_init__(self):
        for name in ("leaf_coarse", "leaf_fine", "cluster_eps", "safety_scale"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be positive")
        if self.cluster_min_pts < 1:
            raise ParameterError("cluster_min_pts must be at least 1")
        if self.max_triangles < 4:
            raise ParameterError("max_triangles must be at least 4")
        if self.leaf_fine > self.leaf_coarse:
            raise ParameterError("leaf_fine must not exceed leaf_coarse")

    def to_dict(self) -> dict:
        return {"leaf_coarse": self.leaf_coarse, "leaf_fine": self.leaf_fine,
                "cluster_eps": self.cluster_eps,
                "cluster_min_pts": self.cluster_min_pts,
                "max_triangles": self.max_triangles,
                "safety_scale": self.safety_scale}

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineParams":
        return cls(**d)


@dataclass
class CollisionMesh:
    """World-frame convex mesh plus the provenance needed to audit it."""

    mesh: TriangleMesh
    source_object: str
    scale_applied: float
    created_at_ms: int = 0

    def to_dict(self) -> dict:
        d = self.mesh.to_dict()
        d["source_object"] = self.source_object
        d["scale_applied"] = self.scale_applied
        d["created_at_ms"] = self.created_at_ms
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CollisionMesh":
        mesh = TriangleMesh.from_dict(
            {k: d[k] for k in ("vertices", "triangles", "frame") if k in d})
        return cls(mesh, d["source_object"], float(d["scale_applied"]),
                   int(d.get("created_at_ms", 0)))


def build_collision_mesh(subcloud: PointCloud, params: PipelineParams,
                         camera_pose: Isometry, source_object: str = "",
                         created_at_ms: int = 0) -> CollisionMesh:
    """Run the full cloud-to-mesh pipeline on a camera-frame subcloud.

    Raises TooSparseError when density clustering leaves nothing, and lets
    hull degeneracies (collinear/coplanar inputs) propagate.
    """
    coarse = voxel_downsample(subcloud, params.leaf_coarse)
    radius = select_normal_radius(len(coarse.points))
    with_normals = estimate_normals(coarse, radius)
    cluster = dbscan_largest_cluster(with_normals, params.cluster_eps,
                                     params.cluster_min_pts)
    if len(cluster.points) == 0:
        raise TooSparseError(
            f"no cluster of at least {params.cluster_min_pts} points at "
            f"eps={params.cluster_eps}")
    fine = voxel_downsample(cluster, params.leaf_fine)
    hull = convex_hull(fine.points, frame=fine.frame)
    hull = decimate(hull, params.max_triangles)
    hull = scale_about_centroid(hull, params.safety_scale)
    world = hull.transformed(camera_pose, "world")
    return CollisionMesh(world, source_object, params.safety_scale,
                         created_at_ms)

"""Geometry kernel: rigid transforms, point-cloud filtering, convex hulls,
mesh decimation and minimum-distance queries."""
from .cloud import (DENSE_POINT_COUNT, dbscan_largest_cluster, estimate_normals,
                    select_normal_radius, voxel_downsample)
from .decimate import decimate
from .distance import (capsule_capsule_distance, capsule_convex_distance,
                       capsule_convex_witness, segment_segment_closest)
from .hull import classify_degeneracy, convex_hull, scale_about_centroid
from .io import load_mesh_json, load_ply, save_mesh_json, save_ply
from .isometry import (Isometry, quat_conjugate, quat_from_axis_angle,
                       quat_multiply, quat_rotate, quat_to_axis_angle,
                       quat_to_matrix)
from .types import CONVEXITY_TOL, Capsule, PointCloud, TriangleMesh

__all__ = [
    "CONVEXITY_TOL", "DENSE_POINT_COUNT", "Capsule", "Isometry", "PointCloud",
    "TriangleMesh", "capsule_capsule_distance", "capsule_convex_distance",
    "capsule_convex_witness", "classify_degeneracy", "convex_hull",
    "dbscan_largest_cluster", "decimate", "estimate_normals", "load_mesh_json",
    "load_ply", "quat_conjugate", "quat_from_axis_angle", "quat_multiply",
    "quat_rotate", "quat_to_axis_angle", "quat_to_matrix", "save_mesh_json",
    "save_ply", "scale_about_centroid", "segment_segment_closest",
    "select_normal_radius", "voxel_downsample",
]

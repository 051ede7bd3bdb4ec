"""Point-cloud filtering: voxel downsampling, normal estimation, DBSCAN.

These are the cloud-side stages of the obstacle pipeline. All functions are
pure and deterministic: voxel output follows first-occurrence order of the
occupied voxels, DBSCAN visits points in index order with FIFO expansion, so
re-running on identical input reproduces the output bit for bit.
"""
from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from ..errors import ParameterError
from .types import PointCloud

DENSE_POINT_COUNT = 110_000
NORMAL_RADIUS_DENSE = 0.10
NORMAL_RADIUS_SPARSE = 0.20


def voxel_downsample(cloud: PointCloud, leaf: float) -> PointCloud:
    """Replace each occupied voxel with the centroid of its member points.

    The grid is axis-aligned with origin 0 and cell size ``leaf``. Output
    points appear in first-occurrence order of their voxel. Normals are
    dropped: averaging invalidates them and the pipeline re-estimates after
    the pass that needs them.
    """
    if not np.isfinite(leaf) or leaf <= 0:
        raise ParameterError(f"voxel leaf size must be positive, got {leaf}")
    pts = cloud.points
    if len(pts) == 0:
        return PointCloud(np.empty((0, 3)), frame=cloud.frame)
    keys = np.floor(pts / leaf).astype(np.int64)
    # lexicographic unique; remap to first-occurrence order so output is stable
    _, first_idx, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    order = np.argsort(first_idx, kind="stable")
    rank = np.empty(len(order), dtype=np.int64)
    rank[order] = np.arange(len(order))
    groups = rank[inverse]
    n_vox = len(first_idx)
    sums = np.zeros((n_vox, 3))
    np.add.at(sums, groups, pts)
    counts = np.bincount(groups, minlength=n_vox).astype(float)
    return PointCloud(sums / counts[:, None], frame=cloud.frame)


def select_normal_radius(point_count: int) -> float:
    """Density-dependent normal search radius: 0.10 m for dense clouds
    (more than 1.1e5 points), 0.20 m otherwise."""
    if point_count < 0:
        raise ParameterError("point count must be non-negative")
    return NORMAL_RADIUS_DENSE if point_count > DENSE_POINT_COUNT else NORMAL_RADIUS_SPARSE


def estimate_normals(cloud: PointCloud, radius: float) -> PointCloud:
    """Per-point unit normals from the covariance of the radius neighborhood.

    The normal is the eigenvector of the smallest covariance eigenvalue,
    oriented toward the sensor origin (the origin of the cloud's frame).
    Points with fewer than 3 neighbors (self included) get normal (0, 0, 1)
    and are flagged in ``degenerate``.
    """
    if not np.isfinite(radius) or radius <= 0:
        raise ParameterError(f"normal search radius must be positive, got {radius}")
    pts = cloud.points
    if len(pts) == 0:
        raise ParameterError("cannot estimate normals of an empty cloud")
    tree = cKDTree(pts)
    neighborhoods = tree.query_ball_point(pts, radius)
    normals = np.zeros_like(pts)
    degenerate = np.zeros(len(pts), dtype=bool)
    for i, nbr in enumerate(neighborhoods):
        if len(nbr) < 3:
            normals[i] = (0.0, 0.0, 1.0)
            degenerate[i] = True
            continue
        nbr_pts = pts[nbr]
        centered = nbr_pts - nbr_pts.mean(axis=0)
        cov = centered.T @ centered
        _, vecs = np.linalg.eigh(cov)
        n = vecs[:, 0]
        # orient toward the sensor at the frame origin
        if np.dot(n, -pts[i]) < 0:
            n = -n
        normals[i] = n
    return PointCloud(pts.copy(), normals, cloud.frame, degenerate)


def dbscan_largest_cluster(cloud: PointCloud, eps: float, min_pts: int) -> PointCloud:
    """Points of the largest DBSCAN cluster (noise excluded).

    Standard DBSCAN: a point is core if its eps-neighborhood (self included)
    has at least ``min_pts`` members; clusters grow from cores in index order
    with FIFO expansion, so border points attach to the first cluster that
    reaches them. Ties on cluster size break toward the lowest cluster id.
    Returns an empty cloud when no cluster forms.
    """
    if not np.isfinite(eps) or eps <= 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    if min_pts < 1:
        raise ParameterError(f"min_pts must be >= 1, got {min_pts}")
    pts = cloud.points
    n = len(pts)
    if n == 0:
        return PointCloud(np.empty((0, 3)), frame=cloud.frame)

    tree = cKDTree(pts)
    neighborhoods = [sorted(nbr) for nbr in tree.query_ball_point(pts, eps)]
    is_core = np.array([len(nbr) >= min_pts for nbr in neighborhoods])

    labels = np.full(n, -1, dtype=np.int64)
    cluster_id = 0
    for seed in range(n):
        if labels[seed] != -1 or not is_core[seed]:
            continue
        labels[seed] = cluster_id
        queue = list(neighborhoods[seed])
        head = 0
        while head < len(queue):
            j = queue[head]
            head += 1
            if labels[j] != -1:
                continue
            labels[j] = cluster_id
            if is_core[j]:
                queue.extend(neighborhoods[j])
        cluster_id += 1

    if cluster_id == 0:
        return PointCloud(np.empty((0, 3)), frame=cloud.frame)
    sizes = np.bincount(labels[labels >= 0], minlength=cluster_id)
    best = int(np.argmax(sizes))  # argmax takes the lowest id on ties
    return cloud.select(np.flatnonzero(labels == best))

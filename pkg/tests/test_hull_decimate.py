"""Convex hull, scaling, and decimation against first-principles checks.

The oracle side recomputes face planes, containment, watertightness, and
volume from raw vertex/triangle arrays instead of trusting the mesh methods.
"""
import numpy as np
import pytest

from hullguard.errors import DegenerateGeometryError, ParameterError, TopologyError
from hullguard.geometry import TriangleMesh, convex_hull, decimate, scale_about_centroid


def planes_of(mesh):
    v, t = mesh.vertices, mesh.triangles
    n = np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])
    n /= np.linalg.norm(n, axis=1, keepdims=True)
    return n, np.einsum("ij,ij->i", n, v[t[:, 0]])


def oracle_contains(mesh, pts, tol):
    n, b = planes_of(mesh)
    return np.max(np.asarray(pts) @ n.T - b[None, :], axis=1) <= tol


def oracle_watertight(mesh):
    counts = {}
    for i, j, k in mesh.triangles:
        for a, b in ((i, j), (j, k), (k, i)):
            key = (min(a, b), max(a, b))
            counts[key] = counts.get(key, 0) + 1
    return len(counts) > 0 and all(c == 2 for c in counts.values())


def oracle_volume(mesh):
    v, t = mesh.vertices, mesh.triangles
    return float(np.einsum("ij,ij->", v[t[:, 0]], np.cross(v[t[:, 1]], v[t[:, 2]]))) / 6.0


def test_hull_contains_all_inputs_500_points(rng):
    for _ in range(5):
        pts = rng.normal(size=(500, 3))
        mesh = convex_hull(pts)
        assert oracle_contains(mesh, pts, 1e-7).all()
        assert oracle_watertight(mesh)
        assert oracle_volume(mesh) > 0  # outward winding


def test_hull_of_cube_corners_exact():
    corners = np.array([[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)], float)
    mesh = convex_hull(corners)
    assert len(mesh.vertices) == 8
    assert mesh.num_triangles() == 12
    assert np.isclose(oracle_volume(mesh), 1.0, atol=1e-12)
    # interior points of the input (here: none beyond corners) and random
    # interior samples are contained
    inner = np.random.default_rng(1).uniform(0.01, 0.99, size=(100, 3))
    assert oracle_contains(mesh, inner, 1e-9).all()
    # just outside a face is not contained
    assert not oracle_contains(mesh, np.array([[0.5, 0.5, 1.0 + 1e-5]]), 1e-7)[0]


def test_hull_interior_points_dropped(rng):
    shell = rng.normal(size=(60, 3))
    shell /= np.linalg.norm(shell, axis=1, keepdims=True)
    interior = rng.normal(size=(40, 3)) * 0.3
    mesh = convex_hull(np.vstack([shell, interior]))
    assert len(mesh.vertices) == 60


def test_hull_determinism(rng):
    pts = rng.normal(size=(200, 3))
    m1, m2 = convex_hull(pts), convex_hull(pts)
    assert np.array_equal(m1.vertices, m2.vertices)
    assert np.array_equal(m1.triangles, m2.triangles)


def test_hull_degeneracies_raise_with_mode():
    with pytest.raises(DegenerateGeometryError, match="too-few-points"):
        convex_hull(np.zeros((3, 3)))
    line = np.outer(np.linspace(0, 1, 10), [1.0, 2.0, 3.0])
    with pytest.raises(DegenerateGeometryError, match="collinear"):
        convex_hull(line)
    plane = np.column_stack([np.random.default_rng(0).normal(size=(20, 2)), np.zeros(20)])
    with pytest.raises(DegenerateGeometryError, match="coplanar"):
        convex_hull(plane)
    with pytest.raises(DegenerateGeometryError, match="collinear"):
        convex_hull(np.tile([1.0, 1.0, 1.0], (6, 1)))  # single repeated point


def test_scale_about_centroid_volume_and_centroid(rng):
    mesh = convex_hull(rng.normal(size=(100, 3)))
    for s in (0.5, 1.05, 2.0):
        scaled = scale_about_centroid(mesh, s)
        assert np.allclose(scaled.vertex_centroid(), mesh.vertex_centroid(), atol=1e-12)
        assert np.isclose(oracle_volume(scaled), oracle_volume(mesh) * s**3, rtol=1e-10)
        assert np.array_equal(scaled.triangles, mesh.triangles)
    with pytest.raises(ParameterError):
        scale_about_centroid(mesh, 0.0)


def test_scale_is_exactly_affine(rng):
    mesh = convex_hull(rng.normal(size=(50, 3)))
    s = 1.05
    c = mesh.vertices.mean(axis=0)
    expect = c + s * (mesh.vertices - c)
    assert np.allclose(scale_about_centroid(mesh, s).vertices, expect, atol=0.0)


def test_decimate_cap_and_watertightness(rng):
    dirs = rng.normal(size=(2000, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    mesh = convex_hull(dirs)
    assert mesh.num_triangles() > 3000
    out = decimate(mesh, 500)
    assert out.num_triangles() <= 500
    assert oracle_watertight(out)
    # decimated sphere approximation stays near the unit sphere
    r = np.linalg.norm(out.vertices, axis=1)
    assert r.min() > 0.8 and r.max() < 1.2
    assert np.isclose(oracle_volume(out), oracle_volume(mesh), rtol=0.2)


def test_decimate_noop_below_cap(rng):
    mesh = convex_hull(rng.normal(size=(30, 3)))
    out = decimate(mesh, 5000)
    assert out is mesh


def test_decimate_validation(rng):
    mesh = convex_hull(rng.normal(size=(30, 3)))
    with pytest.raises(ParameterError):
        decimate(mesh, 3)
    open_mesh = TriangleMesh(mesh.vertices, mesh.triangles[:-2])
    with pytest.raises(TopologyError):
        decimate(open_mesh, 5000)


def test_mesh_validation_and_queries(rng):
    with pytest.raises(ParameterError):
        TriangleMesh(np.zeros((3, 3)), [[0, 1, 3]])  # index out of range
    cube = convex_hull(np.array(
        [[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)], float))
    assert cube.is_convex()
    assert cube.is_watertight()
    assert np.isclose(cube.volume(), 1.0)
    c, r = cube.bounding_radius()
    assert np.allclose(c, [0.5, 0.5, 0.5])
    assert np.isclose(r, np.sqrt(3) / 2)

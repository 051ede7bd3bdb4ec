"""Depth renderer and back-projection against scalar per-pixel ray oracles."""
import math

import numpy as np
import pytest

from hullguard.errors import NotVisibleError, ParameterError
from hullguard.geometry import Isometry
from hullguard.perception import (
    CameraIntrinsics,
    DepthView,
    SceneObject,
    project_mask_to_subcloud,
    render_depth_view,
)
from hullguard.geometry.hull import convex_hull

INTR = CameraIntrinsics(fx=100.0, fy=100.0, cx=32.0, cy=24.0)
RES = (64, 48)


# --- independent scalar ray oracles (deliberately different algorithms) ---

def oracle_box(o, d, dims):
    """Min positive t via the six face planes, not the slab method."""
    half = [dims[0] / 2, dims[1] / 2, dims[2] / 2]
    best = math.inf
    for axis in range(3):
        if abs(d[axis]) < 1e-15:
            continue
        for sgn in (-1.0, 1.0):
            t = (sgn * half[axis] - o[axis]) / d[axis]
            if t <= 1e-9 or t >= best:
                continue
            p = [o[k] + t * d[k] for k in range(3)]
            if all(abs(p[k]) <= half[k] + 1e-9 for k in range(3) if k != axis):
                best = t
    return best


def oracle_sphere(o, d, r):
    coeffs = [np.dot(d, d), 2 * np.dot(o, d), np.dot(o, o) - r * r]
    best = math.inf
    for root in np.roots(coeffs):
        if abs(root.imag) < 1e-12 and root.real > 1e-9:
            best = min(best, root.real)
    return best


def oracle_cylinder(o, d, r, h):
    best = math.inf
    a = d[0] ** 2 + d[1] ** 2
    if a > 1e-15:
        for root in np.roots([a, 2 * (o[0] * d[0] + o[1] * d[1]),
                              o[0] ** 2 + o[1] ** 2 - r * r]):
            if abs(root.imag) < 1e-12 and root.real > 1e-9:
                z = o[2] + root.real * d[2]
                if abs(z) <= h / 2:
                    best = min(best, root.real)
    if abs(d[2]) > 1e-15:
        for zc in (-h / 2, h / 2):
            t = (zc - o[2]) / d[2]
            if t > 1e-9:
                x, y = o[0] + t * d[0], o[1] + t * d[1]
                if x * x + y * y <= r * r:
                    best = min(best, t)
    return best


def oracle_depth(scene, camera_pose, intr, u, v):
    """Nearest hit over the scene for one pixel, fully scalar."""
    d_cam = np.array([(u - intr.cx) / intr.fx, (v - intr.cy) / intr.fy, 1.0])
    R = camera_pose.rotation_matrix()
    d_w = R @ d_cam
    o_w = camera_pose.t
    best, label = math.inf, -1
    for idx, obj in enumerate(scene):
        inv = obj.pose.inverse()
        o = inv.apply(o_w)
        d = inv.rotation_matrix() @ d_w
        g = obj.geometry
        if g["type"] == "box":
            t = oracle_box(o, d, g["dims"])
        elif g["type"] == "sphere":
            t = oracle_sphere(o, d, float(g["dims"][0]))
        else:
            t = oracle_cylinder(o, d, float(g["dims"][0]), float(g["dims"][1]))
        if t < best:
            best, label = t, idx
    return best, label


def sphere_at(z, r=1.0, oid="ball"):
    return SceneObject(id=oid, label=oid, geometry={"type": "sphere", "dims": [r]},
                       pose=Isometry.from_translation([0, 0, z]))


def test_unit_sphere_two_meters_ahead_center_depth():
    view = render_depth_view([sphere_at(2.0)], Isometry.identity(), INTR, RES)
    assert view.depth[int(INTR.cy), int(INTR.cx)] == pytest.approx(1.0, abs=1e-6)
    assert view.object_ids[view.labels[int(INTR.cy), int(INTR.cx)]] == "ball"


def test_every_pixel_matches_scalar_oracle():
    # Generic (rotated + translated) primitives so no ray grazes an exact edge.
    scene = [
        SceneObject(id="crate", label="crate",
                    geometry={"type": "box", "dims": [0.6, 0.4, 0.3]},
                    pose=Isometry.from_axis_angle([0.3, 1.0, 0.2], 0.7,
                                                  [0.13, -0.07, 1.8])),
        SceneObject(id="ball", label="ball",
                    geometry={"type": "sphere", "dims": [0.35]},
                    pose=Isometry.from_translation([-0.4, 0.21, 2.3])),
        SceneObject(id="can", label="can",
                    geometry={"type": "cylinder", "dims": [0.2, 0.5]},
                    pose=Isometry.from_axis_angle([1.0, 0.1, 0.0], 1.1,
                                                  [0.55, 0.33, 2.6])),
    ]
    cam = Isometry.from_axis_angle([0.0, 1.0, 0.0], 0.15, [0.1, 0.05, -0.2])
    view = render_depth_view(scene, cam, INTR, RES)
    for v in range(0, RES[1], 3):
        for u in range(0, RES[0], 3):
            t, label = oracle_depth(scene, cam, INTR, u, v)
            if math.isinf(t):
                assert view.depth[v, u] == 0.0
                assert view.labels[v, u] == -1
            else:
                assert view.depth[v, u] == pytest.approx(t, abs=1e-9)
                assert view.labels[v, u] == label


def test_mesh_object_matches_analytic_box():
    dims = [0.5, 0.4, 0.6]
    h = np.array(dims) / 2
    corners = np.array([[sx * h[0], sy * h[1], sz * h[2]]
                        for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)])
    mesh = convex_hull(corners)
    pose = Isometry.from_axis_angle([0.2, 0.9, 0.1], 0.5, [0.05, 0.1, 2.0])
    as_mesh = SceneObject(id="m", label="m", geometry={"type": "mesh", "mesh": mesh},
                          pose=pose)
    as_box = SceneObject(id="b", label="b", geometry={"type": "box", "dims": dims},
                         pose=pose)
    vm = render_depth_view([as_mesh], Isometry.identity(), INTR, RES)
    vb = render_depth_view([as_box], Isometry.identity(), INTR, RES)
    assert (vm.depth > 0).sum() > 200
    np.testing.assert_allclose(vm.depth, vb.depth, atol=1e-9)


def test_nearest_hit_wins_where_objects_overlap():
    front = SceneObject(id="front", label="front",
                        geometry={"type": "box", "dims": [0.4, 0.4, 0.1]},
                        pose=Isometry.from_translation([0, 0, 1.0]))
    back = SceneObject(id="back", label="back",
                       geometry={"type": "box", "dims": [2.0, 2.0, 0.1]},
                       pose=Isometry.from_translation([0, 0, 2.0]))
    view = render_depth_view([back, front], Isometry.identity(), INTR, RES)
    cy, cx = int(INTR.cy), int(INTR.cx)
    assert view.object_ids[view.labels[cy, cx]] == "front"
    assert view.depth[cy, cx] == pytest.approx(0.95, abs=1e-9)
    assert view.object_ids[view.labels[0, 0]] == "back"


def test_principal_point_backprojects_onto_optical_axis():
    view = render_depth_view([sphere_at(3.0, r=0.001)], Isometry.identity(),
                             INTR, RES)
    cloud = project_mask_to_subcloud(view, "ball")
    assert len(cloud.points) == 1
    np.testing.assert_allclose(cloud.points[0], [0.0, 0.0, 2.999], atol=1e-6)


def test_backprojection_lands_on_surface():
    view = render_depth_view([sphere_at(2.0, r=0.5)], Isometry.identity(), INTR, RES)
    cloud = project_mask_to_subcloud(view, "ball")
    assert cloud.frame == "camera"
    r = np.linalg.norm(cloud.points - np.array([0, 0, 2.0]), axis=1)
    np.testing.assert_allclose(r, 0.5, atol=1e-9)


def test_box_face_fills_predicted_pixel_rect_and_fits_plane():
    sigma = 0.005
    # Front face at z = 1.95 with half extents (0.5, 0.4).
    scene = [SceneObject(id="wall", label="wall",
                         geometry={"type": "box", "dims": [1.0, 0.8, 0.1]},
                         pose=Isometry.from_translation([0, 0, 2.0]))]
    clean = render_depth_view(scene, Isometry.identity(), INTR, RES)
    half_u = INTR.fx * 0.5 / 1.95
    half_v = INTR.fy * 0.4 / 1.95
    for v in range(RES[1]):
        for u in range(RES[0]):
            inside = (abs(u - INTR.cx) < half_u - 1) and (abs(v - INTR.cy) < half_v - 1)
            outside = (abs(u - INTR.cx) > half_u + 1) or (abs(v - INTR.cy) > half_v + 1)
            if inside:
                assert clean.labels[v, u] == 0
            elif outside:
                assert clean.labels[v, u] == -1
    noisy = render_depth_view(scene, Isometry.identity(), INTR, RES,
                              noise_sigma=sigma, seed=2)
    pts = project_mask_to_subcloud(noisy, "wall").points
    centered = pts - pts.mean(axis=0)
    rms = np.linalg.svd(centered, compute_uv=False)[-1] / math.sqrt(len(pts))
    assert 0.0 < rms <= sigma


def test_noisy_backprojection_stays_within_noise_band():
    sigma = 0.004
    view = render_depth_view([sphere_at(2.0, r=0.5)], Isometry.identity(), INTR,
                             RES, noise_sigma=sigma, seed=7)
    cloud = project_mask_to_subcloud(view, "ball")
    r = np.linalg.norm(cloud.points - np.array([0, 0, 2.0]), axis=1)
    # depth perturbation moves the point along its ray; 6 sigma covers all draws
    assert np.abs(r - 0.5).max() < 6 * sigma * 1.5 + 1e-6


def test_noise_is_seeded_and_deterministic():
    scene = [sphere_at(2.0)]
    a = render_depth_view(scene, Isometry.identity(), INTR, RES, 0.005, seed=3)
    b = render_depth_view(scene, Isometry.identity(), INTR, RES, 0.005, seed=3)
    c = render_depth_view(scene, Isometry.identity(), INTR, RES, 0.005, seed=4)
    assert np.array_equal(a.depth, b.depth)
    assert not np.array_equal(a.depth, c.depth)


def test_noise_statistics_and_miss_pixels_untouched():
    scene = [SceneObject(id="wall", label="wall",
                         geometry={"type": "box", "dims": [1.0, 0.8, 0.1]},
                         pose=Isometry.from_translation([0, 0, 2.0]))]
    clean = render_depth_view(scene, Isometry.identity(), INTR, RES)
    noisy = render_depth_view(scene, Isometry.identity(), INTR, RES, 0.005, seed=1)
    hit = clean.depth > 0
    assert hit.sum() > 500
    resid = (noisy.depth - clean.depth)[hit]
    assert abs(resid.std() - 0.005) < 0.001
    assert np.all(noisy.depth[~hit] == 0.0)
    assert np.all(noisy.depth[hit] > 0.0)


def test_large_noise_never_pushes_depth_nonpositive():
    view = render_depth_view([sphere_at(0.5, r=0.4)], Isometry.identity(), INTR,
                             RES, noise_sigma=1.0, seed=0)
    hit = view.labels >= 0
    assert np.all(view.depth[hit] > 0.0)


def test_camera_pose_is_applied():
    # Camera shifted and yawed 90 degrees: looking down +x of the world.
    cam = Isometry.from_axis_angle([0, 1, 0], math.pi / 2, [0.5, 0.0, 0.0])
    obj = SceneObject(id="ball", label="ball",
                      geometry={"type": "sphere", "dims": [0.3]},
                      pose=Isometry.from_translation([2.5, 0.0, 0.0]))
    view = render_depth_view([obj], cam, INTR, RES)
    assert view.depth[int(INTR.cy), int(INTR.cx)] == pytest.approx(1.7, abs=1e-6)


def test_object_behind_camera_is_not_visible():
    view = render_depth_view([sphere_at(-2.0)], Isometry.identity(), INTR, RES)
    assert not (view.labels >= 0).any()
    with pytest.raises(NotVisibleError):
        project_mask_to_subcloud(view, "ball")


def test_fully_occluded_object_is_not_visible():
    hidden = SceneObject(id="hidden", label="hidden",
                         geometry={"type": "sphere", "dims": [0.05]},
                         pose=Isometry.from_translation([0, 0, 3.0]))
    screen = SceneObject(id="screen", label="screen",
                         geometry={"type": "box", "dims": [5.0, 5.0, 0.1]},
                         pose=Isometry.from_translation([0, 0, 1.0]))
    view = render_depth_view([hidden, screen], Isometry.identity(), INTR, RES)
    with pytest.raises(NotVisibleError):
        project_mask_to_subcloud(view, "hidden")
    # and an id that was never in the scene
    with pytest.raises(NotVisibleError):
        project_mask_to_subcloud(view, "ghost")


def test_depth_view_validation():
    depth = np.zeros((4, 5))
    labels = np.full((4, 5), -1)
    DepthView(5, 4, INTR, Isometry.identity(), depth, labels, [])
    bad = labels.copy()
    bad[0, 0] = 0  # labeled pixel with zero depth
    with pytest.raises(ParameterError):
        DepthView(5, 4, INTR, Isometry.identity(), depth, bad, ["x"])
    with pytest.raises(ParameterError):
        DepthView(4, 5, INTR, Isometry.identity(), depth, labels, [])
    with pytest.raises(ParameterError):
        DepthView(5, 4, INTR, Isometry.identity(), depth - 1.0, labels, [])


def test_parameter_validation():
    with pytest.raises(ParameterError):
        CameraIntrinsics(fx=0.0, fy=100.0, cx=32.0, cy=24.0)
    with pytest.raises(ParameterError):
        render_depth_view([], Isometry.identity(), INTR, (0, 48))
    with pytest.raises(ParameterError):
        render_depth_view([], Isometry.identity(), INTR, RES, noise_sigma=-0.1)


def test_intrinsics_roundtrip():
    d = INTR.to_dict()
    assert CameraIntrinsics.from_dict(d).to_dict() == d

"""Ground-truth collision checking against true scene primitives.

This checker is the experiment's referee: it tests link capsules against the
analytic box/sphere/cylinder geometry (or the raw mesh), never against the
segmented hulls the controller avoids, so controller and evaluator cannot
share a blind spot.

Signed distances use the capsule core: distance from the core segment to the
solid primitive, minus the capsule radius. Exact closed forms cover the
sphere; box and cylinder reduce to one-dimensional convex (outside) or
concave (inside) profiles along the core, nailed down by golden-section
search to far below the 1e-9 tangency tolerance.
"""
from __future__ import annotations

import numpy as np

from ..geometry.distance import capsule_convex_distance, segment_segment_closest
from ..geometry.types import Capsule
from ..kinematics import RobotModel, world_capsules
from ..perception import SceneObject

TANGENCY_TOL = 1e-9
_PHI = (np.sqrt(5.0) - 1.0) / 2.0


def _golden_min(f, lo=0.0, hi=1.0, iters=90):
    """Minimum of a unimodal f on [lo, hi] to ~1e-19 interval width."""
    a, b = lo, hi
    c = b - _PHI * (b - a)
    d = a + _PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _PHI * (b - a)
            fd = f(d)
    t = (a + b) / 2.0
    return t, f(t)


def _segment_convex_signed(p0, p1, outside_dist, inside_clearance):
    """Signed distance from segment to a solid convex region.

    outside_dist(p) is the (convex) distance to the region, 0 inside;
    inside_clearance(p) is the (concave) depth inside, negative outside.
    """
    seg = lambda t: p0 + t * (p1 - p0)
    _, dmin = _golden_min(lambda t: outside_dist(seg(t)))
    if dmin > 0.0:
        return float(dmin)
    _, neg_depth = _golden_min(lambda t: -inside_clearance(seg(t)))
    return float(min(neg_depth, 0.0))


def signed_core_box(p0, p1, half):
    def outside(p):
        return float(np.linalg.norm(np.maximum(np.abs(p) - half, 0.0)))

    def clearance(p):
        return float(np.min(half - np.abs(p)))

    return _segment_convex_signed(p0, p1, outside, clearance)


def signed_core_cylinder(p0, p1, radius, half_h):
    def outside(p):
        dr = max(np.hypot(p[0], p[1]) - radius, 0.0)
        dz = max(abs(p[2]) - half_h, 0.0)
        return float(np.hypot(dr, dz))

    def clearance(p):
        return float(min(radius - np.hypot(p[0], p[1]), half_h - abs(p[2])))

    return _segment_convex_signed(p0, p1, outside, clearance)


def capsule_object_signed_distance(capsule: Capsule, obj: SceneObject) -> float:
    """Capsule-level signed distance: < 0 means overlap, 0 means tangency."""
    inv = obj.pose.inverse()
    p0 = inv.apply(capsule.endpoint_a)
    p1 = inv.apply(capsule.endpoint_b)
    g = obj.geometry
    if g["type"] == "sphere":
        _, _, core = segment_segment_closest(p0, p1, np.zeros(3), np.zeros(3))
        return float(core - g["dims"][0] - capsule.radius)
    if g["type"] == "box":
        return signed_core_box(p0, p1, np.asarray(g["dims"], float) / 2.0) \
            - capsule.radius
    if g["type"] == "cylinder":
        r, h = float(g["dims"][0]), float(g["dims"][1])
        return signed_core_cylinder(p0, p1, r, h / 2.0) - capsule.radius
    _, _, dist = capsule_convex_distance(Capsule(p0, p1, capsule.radius),
                                         g["mesh"])
    return float(dist)


def _bounding_radius(obj: SceneObject) -> float:
    g = obj.geometry
    if g["type"] == "sphere":
        return float(g["dims"][0])
    if g["type"] == "box":
        return float(np.linalg.norm(np.asarray(g["dims"], float) / 2.0))
    if g["type"] == "cylinder":
        return float(np.hypot(g["dims"][0], g["dims"][1] / 2.0))
    verts = g["mesh"].vertices
    return float(np.linalg.norm(verts - verts.mean(axis=0), axis=1).max())


def detect_collision(model: RobotModel, q, scene: list[SceneObject],
                     poses=None):
    """(colliding, (link, object id) | None, penetration depth).

    Open-contact convention: a pair exactly at distance zero (within 1e-9)
    does not count as a collision.
    """
    bounds = []
    for obj in scene:
        g = obj.geometry
        center = obj.pose.apply(g["mesh"].vertices.mean(axis=0)) \
            if g["type"] == "mesh" else obj.pose.t
        bounds.append((obj, center, _bounding_radius(obj)))
    worst = 0.0
    worst_pair = None
    for link, capsule in world_capsules(model, q, poses=poses):
        mid = 0.5 * (capsule.endpoint_a + capsule.endpoint_b)
        reach = 0.5 * np.linalg.norm(capsule.endpoint_b - capsule.endpoint_a) \
            + capsule.radius
        for obj, center, bound in bounds:
            # cheap sphere-sphere bound: pairs with clearance cannot collide
            if np.linalg.norm(mid - center) - reach - bound > 0.01:
                continue
            signed = capsule_object_signed_distance(capsule, obj)
            if signed < -TANGENCY_TOL and -signed > worst:
                worst = -signed
                worst_pair = (link, obj.id)
    if worst_pair is None:
        return False, None, 0.0
    return True, worst_pair, worst

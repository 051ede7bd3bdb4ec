"""Minimum-distance queries used by the velocity-damping constraints.

``segment_segment_closest`` is the capsule-capsule core; GJK between a segment
and a convex polytope (minus the capsule radius) covers the link-vs-obstacle
case. Penetration depth falls back to supporting-plane analysis, which yields
the exact minimum translation for a point inside a convex polytope and a
conservative value for a segment.
"""
from __future__ import annotations

import numpy as np

from ..errors import GeometryError, ParameterError
from .isometry import cross3
from .types import Capsule, TriangleMesh

_EPS = 1e-12


def segment_segment_closest(a0, a1, b0, b1) -> tuple[np.ndarray, np.ndarray, float]:
    """Globally closest points between segments [a0, a1] and [b0, b1].

    Degenerate (point) segments are legal. Returns (cp_a, cp_b, distance).
    """
    a0 = np.asarray(a0, dtype=float)
    a1 = np.asarray(a1, dtype=float)
    b0 = np.asarray(b0, dtype=float)
    b1 = np.asarray(b1, dtype=float)
    for v in (a0, a1, b0, b1):
        if not np.all(np.isfinite(v)):
            raise ParameterError("segment endpoints must be finite")
    d1 = a1 - a0
    d2 = b1 - b0
    r = a0 - b0
    a = float(d1 @ d1)
    e = float(d2 @ d2)
    f = float(d2 @ r)
    if a <= _EPS and e <= _EPS:
        s = t = 0.0
    elif a <= _EPS:
        s = 0.0
        t = min(1.0, max(0.0, f / e))
    else:
        c = float(d1 @ r)
        if e <= _EPS:
            t = 0.0
            s = min(1.0, max(0.0, -c / a))
        else:
            b = float(d1 @ d2)
            denom = a * e - b * b
            s = min(1.0, max(0.0, (b * f - c * e) / denom)) if denom > _EPS * a * e else 0.0
            t = (b * s + f) / e
            if t < 0.0:
                t = 0.0
                s = min(1.0, max(0.0, -c / a))
            elif t > 1.0:
                t = 1.0
                s = min(1.0, max(0.0, (b - c) / a))
    cp_a = a0 + s * d1
    cp_b = b0 + t * d2
    return cp_a, cp_b, float(np.linalg.norm(cp_a - cp_b))


def capsule_capsule_distance(c1: Capsule, c2: Capsule):
    """Surface distance, surface closest points and the unit line direction
    (from c1 toward c2) between two capsules. Direction comes from the core
    segments so it stays valid under shallow surface penetration."""
    p1, p2, core = segment_segment_closest(c1.endpoint_a, c1.endpoint_b,
                                           c2.endpoint_a, c2.endpoint_b)
    if core > 1e-9:
        n = (p2 - p1) / core
    else:
        n = np.array([0.0, 0.0, 1.0])
    cp1 = p1 + c1.radius * n
    cp2 = p2 - c2.radius * n
    return cp1, cp2, core - c1.radius - c2.radius, n


def _closest_on_segment(w0, w1):
    d = w1 - w0
    dd = float(d @ d)
    if dd <= _EPS:
        return w0, np.array([1.0]), [0]
    t = -float(w0 @ d) / dd
    if t <= 0.0:
        return w0, np.array([1.0]), [0]
    if t >= 1.0:
        return w1, np.array([1.0]), [1]
    return w0 + t * d, np.array([1.0 - t, t]), [0, 1]


def _closest_on_triangle(a, b, c):
    ab = b - a
    ac = c - a
    d1 = -float(ab @ a)
    d2 = -float(ac @ a)
    if d1 <= 0.0 and d2 <= 0.0:
        return a, np.array([1.0]), [0]
    d3 = -float(ab @ b)
    d4 = -float(ac @ b)
    if d3 >= 0.0 and d4 <= d3:
        return b, np.array([1.0]), [1]
    vc = d1 * d4 - d3 * d2
    if vc <= 0.0 and d1 >= 0.0 and d3 <= 0.0:
        v = d1 / (d1 - d3)
        return a + v * ab, np.array([1.0 - v, v]), [0, 1]
    d5 = -float(ab @ c)
    d6 = -float(ac @ c)
    if d6 >= 0.0 and d5 <= d6:
        return c, np.array([1.0]), [2]
    vb = d5 * d2 - d1 * d6
    if vb <= 0.0 and d2 >= 0.0 and d6 <= 0.0:
        w = d2 / (d2 - d6)
        return a + w * ac, np.array([1.0 - w, w]), [0, 2]
    va = d3 * d6 - d5 * d4
    if va <= 0.0 and (d4 - d3) >= 0.0 and (d5 - d6) >= 0.0:
        w = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        return b + w * (c - b), np.array([1.0 - w, w]), [1, 2]
    denom = 1.0 / (va + vb + vc)
    v = vb * denom
    w = vc * denom
    return a + v * ab + w * ac, np.array([1.0 - v - w, v, w]), [0, 1, 2]


def _closest_on_simplex(w: list[np.ndarray]):
    """Closest point of the simplex conv(w) to the origin.

    Returns (point, coefficients, supporting subset); coefficients align with
    the subset entries. Empty subset means the origin is inside a tetrahedron.
    """
    k = len(w)
    if k == 1:
        return w[0], np.array([1.0]), [0]
    if k == 2:
        return _closest_on_segment(w[0], w[1])
    if k == 3:
        return _closest_on_triangle(w[0], w[1], w[2])
    # tetrahedron: origin inside unless it lies outside some face plane
    best = None
    inside = True
    for face, opp in (((0, 1, 2), 3), ((0, 1, 3), 2), ((0, 2, 3), 1), ((1, 2, 3), 0)):
        a, b, c = (w[i] for i in face)
        n = cross3(b - a, c - a)
        side_origin = -float(n @ a)
        side_opp = float(n @ (w[opp] - a))
        if side_origin * side_opp >= 0.0:
            continue  # origin on the interior side of this face
        inside = False
        p, lam, sub = _closest_on_triangle(a, b, c)
        d2 = float(p @ p)
        if best is None or d2 < best[0]:
            best = (d2, p, lam, [face[i] for i in sub])
    if inside:
        return np.zeros(3), np.full(4, 0.25), []
    return best[1], best[2], best[3]


def _segment_polytope_gjk(a0, a1, verts):
    """GJK distance between segment [a0, a1] and conv(verts).

    Returns (distance, cp_segment, cp_polytope); distance 0.0 flags contact or
    intersection of the segment with the polytope.
    """
    seg = (a0, a1)

    def support(d):
        ia = 0 if float(seg[0] @ d) >= float(seg[1] @ d) else 1
        ib = int(np.argmax(verts @ (-d)))
        return seg[ia] - verts[ib], ia, ib

    w0, ia, ib = support(np.array([1.0, 0.0, 0.0]))
    simplex = [(w0, ia, ib)]
    v = w0
    for _ in range(128):
        vv = float(v @ v)
        if vv < 1e-24:
            return 0.0, None, None
        w, ia, ib = support(-v)
        if any(ia == sa and ib == sb for _, sa, sb in simplex):
            break  # support repeated: v is optimal for these polytopes
        if vv - float(w @ v) <= 1e-12 * max(vv, 1.0):
            break
        simplex.append((w, ia, ib))
        p, lam, sub = _closest_on_simplex([s[0] for s in simplex])
        if not sub:  # origin inside tetrahedron
            return 0.0, None, None
        simplex = [simplex[i] for i in sub]
        v = p
    p, lam, sub = _closest_on_simplex([s[0] for s in simplex])
    if not sub:
        return 0.0, None, None
    simplex = [simplex[i] for i in sub]
    lam = lam / lam.sum()
    cp_seg = np.zeros(3)
    cp_poly = np.zeros(3)
    for coeff, (_, sa, sb) in zip(lam, simplex):
        cp_seg += coeff * seg[sa]
        cp_poly += coeff * verts[sb]
    return float(np.linalg.norm(p)), cp_seg, cp_poly


def _mesh_planes(mesh: TriangleMesh):
    planes = getattr(mesh, "_cached_planes", None)
    if planes is None:
        planes = mesh.face_normals()
        mesh._cached_planes = planes
    return planes


def _require_convex(mesh: TriangleMesh):
    ok = getattr(mesh, "_cached_convex", None)
    if ok is None:
        ok = mesh.is_watertight() and mesh.is_convex()
        mesh._cached_convex = ok
    if not ok:
        raise GeometryError("capsule_convex_distance requires a convex watertight mesh")


def _segment_depth(a0, a1, normals, offsets):
    """Deepest point of the segment inside conv{n.x <= b} and its depth.

    Pointwise depth min_f(b_f - n_f . p) is concave piecewise-linear along the
    segment, so golden-section search finds its maximum.
    """
    def depth(t):
        p = a0 + t * (a1 - a0)
        return float(np.min(offsets - normals @ p))

    lo, hi = 0.0, 1.0
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    c = hi - inv_phi * (hi - lo)
    d = lo + inv_phi * (hi - lo)
    fc, fd = depth(c), depth(d)
    for _ in range(80):
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - inv_phi * (hi - lo)
            fc = depth(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + inv_phi * (hi - lo)
            fd = depth(d)
    t_best = 0.5 * (lo + hi)
    for t in (0.0, 1.0, t_best):
        if depth(t) > depth(t_best):
            t_best = t
    p = a0 + t_best * (a1 - a0)
    return p, depth(t_best)


def capsule_convex_witness(cap: Capsule, mesh: TriangleMesh):
    """(cp_link, cp_obs, distance, n) with n the unit closing direction from
    the capsule toward the mesh; valid for both separation and penetration."""
    _require_convex(mesh)
    a0 = cap.endpoint_a
    a1 = cap.endpoint_b
    core, cp_seg, cp_poly = _segment_polytope_gjk(a0, a1, mesh.vertices)
    if core > 1e-10:
        n = (cp_poly - cp_seg) / core
        cp_link = cp_seg + cap.radius * n
        return cp_link, cp_poly, core - cap.radius, n
    # segment touches or crosses the polytope: supporting-plane fallback
    normals, offsets = _mesh_planes(mesh)
    p, depth = _segment_depth(a0, a1, normals, offsets)
    depth = max(depth, 0.0)
    face = int(np.argmin(offsets - normals @ p))
    n_out = normals[face]
    cp_obs = p + (offsets[face] - float(n_out @ p)) * n_out
    cp_link = p - cap.radius * n_out
    return cp_link, cp_obs, -(cap.radius + depth), -n_out


def capsule_convex_distance(cap: Capsule, mesh: TriangleMesh):
    """Minimum distance between a capsule and a convex watertight mesh.

    Negative values flag penetration (magnitude from the supporting-plane
    fallback). Closest points are on the capsule surface and mesh surface.
    """
    cp_link, cp_obs, dist, _ = capsule_convex_witness(cap, mesh)
    return cp_link, cp_obs, dist

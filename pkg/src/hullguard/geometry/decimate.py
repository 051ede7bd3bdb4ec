"""Quadric-error-metric mesh simplification (Garland-Heckbert edge collapses).

Input must be watertight (closed 2-manifold). Collapses respect the link
condition and reject normal flips, so watertightness survives every step.
Each interior-edge collapse removes exactly two triangles.
"""
from __future__ import annotations

import heapq

import numpy as np

from ..errors import ParameterError
from .types import TriangleMesh

_DET_TOL = 1e-12
_FLIP_TOL = 1e-10


def _face_quadric(v0: np.ndarray, v1: np.ndarray, v2: np.ndarray) -> np.ndarray:
    n = np.cross(v1 - v0, v2 - v0)
    norm = np.linalg.norm(n)
    if norm < 1e-300:
        return np.zeros((4, 4))
    n = n / norm
    p = np.array([n[0], n[1], n[2], -float(np.dot(n, v0))])
    return np.outer(p, p)


def _optimal_point(q: np.ndarray, va: np.ndarray, vb: np.ndarray) -> tuple[np.ndarray, float]:
    a = q[:3, :3]
    b = q[:3, 3]
    if abs(np.linalg.det(a)) > _DET_TOL:
        x = np.linalg.solve(a, -b)
        cost = float(np.array([*x, 1.0]) @ q @ np.array([*x, 1.0]))
        return x, cost
    best_x, best_cost = None, np.inf
    for cand in (va, vb, 0.5 * (va + vb)):
        h = np.array([*cand, 1.0])
        cost = float(h @ q @ h)
        if cost < best_cost:
            best_x, best_cost = cand, cost
    return best_x, best_cost


class _Decimator:
    def __init__(self, mesh: TriangleMesh):
        self.pos = [v.copy() for v in mesh.vertices]
        self.faces = [list(map(int, t)) for t in mesh.triangles]
        self.face_alive = [True] * len(self.faces)
        self.vert_alive = [True] * len(self.pos)
        self.version = [0] * len(self.pos)
        self.vfaces: list[set[int]] = [set() for _ in self.pos]
        for fi, f in enumerate(self.faces):
            for v in f:
                self.vfaces[v].add(fi)
        self.quadrics = np.zeros((len(self.pos), 4, 4))
        for fi, f in enumerate(self.faces):
            k = _face_quadric(self.pos[f[0]], self.pos[f[1]], self.pos[f[2]])
            for v in f:
                self.quadrics[v] += k
        self.n_alive_faces = len(self.faces)
        self.heap: list = []
        self.counter = 0
        seen = set()
        for f in self.faces:
            for a, b in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
                key = (min(a, b), max(a, b))
                if key not in seen:
                    seen.add(key)
                    self._push_edge(*key)

    def _push_edge(self, a: int, b: int):
        q = self.quadrics[a] + self.quadrics[b]
        x, cost = _optimal_point(q, self.pos[a], self.pos[b])
        self.counter += 1
        heapq.heappush(self.heap, (cost, self.counter, a, b, self.version[a], self.version[b], x))

    def _neighbors(self, v: int) -> set[int]:
        out: set[int] = set()
        for fi in self.vfaces[v]:
            out.update(self.faces[fi])
        out.discard(v)
        return out

    def _link_ok(self, a: int, b: int, shared_faces: list[int]) -> bool:
        # closed manifold interior edge: common neighbors must be exactly the
        # apex vertices of the two shared faces
        if len(shared_faces) != 2:
            return False
        apexes = set()
        for fi in shared_faces:
            apexes.update(v for v in self.faces[fi] if v not in (a, b))
        common = self._neighbors(a) & self._neighbors(b)
        return common == apexes and len(apexes) == 2

    def _would_flip(self, moved: int, other: int, new_pos: np.ndarray, dying: set[int]) -> bool:
        for v in (moved, other):
            for fi in self.vfaces[v]:
                if fi in dying or not self.face_alive[fi]:
                    continue
                f = self.faces[fi]
                old = [self.pos[i] for i in f]
                new = [new_pos if i in (moved, other) else self.pos[i] for i in f]
                n_old = np.cross(old[1] - old[0], old[2] - old[0])
                n_new = np.cross(new[1] - new[0], new[2] - new[0])
                if np.dot(n_old, n_new) <= _FLIP_TOL * np.dot(n_old, n_old):
                    return True
        return False

    def run(self, max_triangles: int) -> TriangleMesh:
        while self.n_alive_faces > max_triangles and self.heap:
            cost, _, a, b, va, vb, x = heapq.heappop(self.heap)
            if not (self.vert_alive[a] and self.vert_alive[b]):
                continue
            if self.version[a] != va or self.version[b] != vb:
                continue
            shared = [fi for fi in (self.vfaces[a] & self.vfaces[b]) if self.face_alive[fi]]
            if not self._link_ok(a, b, shared):
                continue
            if self.n_alive_faces - 2 < 4:
                break
            dying = set(shared)
            if self._would_flip(b, a, x, dying):
                continue
            # collapse b into a at position x
            for fi in dying:
                self.face_alive[fi] = False
                self.n_alive_faces -= 1
                for v in self.faces[fi]:
                    self.vfaces[v].discard(fi)
            for fi in list(self.vfaces[b]):
                f = self.faces[fi]
                self.faces[fi] = [a if v == b else v for v in f]
                self.vfaces[a].add(fi)
            self.vfaces[b].clear()
            self.vert_alive[b] = False
            self.pos[a] = np.asarray(x, dtype=float)
            self.quadrics[a] += self.quadrics[b]
            self.version[a] += 1
            self.version[b] += 1
            for nb in sorted(self._neighbors(a)):
                self._push_edge(min(a, nb), max(a, nb))
        return self._build()

    def _build(self) -> TriangleMesh:
        remap = {}
        verts = []
        tris = []
        for fi, alive in enumerate(self.face_alive):
            if not alive:
                continue
            tri = []
            for v in self.faces[fi]:
                if v not in remap:
                    remap[v] = len(verts)
                    verts.append(self.pos[v])
                tri.append(remap[v])
            tris.append(tri)
        return TriangleMesh(np.asarray(verts), np.asarray(tris, dtype=np.int64), frame="")


def decimate(mesh: TriangleMesh, max_triangles: int) -> TriangleMesh:
    """Simplify a watertight mesh to at most ``max_triangles`` triangles.

    Meshes already at or under the cap are returned unchanged.
    """
    if max_triangles < 4:
        raise ParameterError("max_triangles must be at least 4 (tetrahedron)")
    mesh.validate_watertight()
    if mesh.num_triangles() <= max_triangles:
        return mesh
    out = _Decimator(mesh).run(max_triangles)
    out.frame = mesh.frame
    return out

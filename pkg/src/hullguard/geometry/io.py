"""ASCII PLY point-cloud files and JSON mesh files.

Only the subset needed here is supported: ASCII PLY 1.0 with float vertex
properties x, y, z and optionally nx, ny, nz. Meshes travel as JSON since
they are small after decimation.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import ParameterError
from .types import PointCloud, TriangleMesh


def save_ply(path, cloud: PointCloud) -> None:
    path = Path(path)
    n = cloud.points.shape[0]
    has_normals = cloud.normals is not None
    lines = ["ply", "format ascii 1.0", f"element vertex {n}",
             "property float x", "property float y", "property float z"]
    if has_normals:
        lines += ["property float nx", "property float ny", "property float nz"]
    lines.append("end_header")
    rows = np.hstack([cloud.points, cloud.normals]) if has_normals else cloud.points
    for row in rows:
        lines.append(" ".join(repr(float(v)) for v in row))
    path.write_text("\n".join(lines) + "\n")


def load_ply(path, frame: str = "camera") -> PointCloud:
    text = Path(path).read_text()
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "ply":
        raise ParameterError(f"{path}: not a PLY file")
    if len(lines) < 2 or not lines[1].startswith("format ascii 1.0"):
        raise ParameterError(f"{path}: only ASCII PLY 1.0 is supported")
    n_vertex = None
    props: list[str] = []
    body_start = None
    element = None
    for i, ln in enumerate(lines[2:], start=2):
        parts = ln.split()
        if parts[0] == "comment":
            continue
        if parts[0] == "element":
            element = parts[1]
            if element == "vertex":
                n_vertex = int(parts[2])
            elif int(parts[2]) != 0:
                raise ParameterError(f"{path}: unsupported element {parts[1]}")
        elif parts[0] == "property":
            if element == "vertex":
                props.append(parts[-1])
        elif parts[0] == "end_header":
            body_start = i + 1
            break
        else:
            raise ParameterError(f"{path}: unsupported header line {ln!r}")
    if n_vertex is None or body_start is None:
        raise ParameterError(f"{path}: malformed PLY header")
    want = ["x", "y", "z"]
    has_normals = {"nx", "ny", "nz"}.issubset(props)
    if has_normals:
        want += ["nx", "ny", "nz"]
    if props[: len(want)] != want or len(props) != len(want):
        raise ParameterError(f"{path}: vertex properties must be x y z [nx ny nz], got {props}")
    body = lines[body_start: body_start + n_vertex]
    if len(body) != n_vertex:
        raise ParameterError(f"{path}: expected {n_vertex} vertex rows, found {len(body)}")
    data = np.array([[float(v) for v in ln.split()] for ln in body], dtype=float)
    data = data.reshape(n_vertex, len(want)) if n_vertex else data.reshape(0, len(want))
    points = data[:, :3]
    normals = data[:, 3:6] if has_normals else None
    return PointCloud(points=points, normals=normals, frame=frame)


def save_mesh_json(path, mesh: TriangleMesh) -> None:
    Path(path).write_text(json.dumps(mesh.to_dict()) + "\n")


def load_mesh_json(path) -> TriangleMesh:
    return TriangleMesh.from_dict(json.loads(Path(path).read_text()))

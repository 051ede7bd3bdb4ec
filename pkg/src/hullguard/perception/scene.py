"""Scene description: labeled primitives with poses.

Objects are analytic primitives (box, sphere, cylinder) or triangle meshes so
that depth rendering and volume checks have closed-form ground truth.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ParameterError
from ..geometry import Isometry, TriangleMesh

_PRIMITIVES = ("box", "sphere", "cylinder", "mesh")


@dataclass
class SceneObject:
    """One labeled scene element.

    geometry: {"type": "box", "dims": [lx, ly, lz]} (full extents), or
    {"type": "sphere", "dims": [r]}, {"type": "cylinder", "dims": [r, h]}
    (axis along local z), or {"type": "mesh", "mesh": TriangleMesh}.
    """

    id: str
    label: str
    geometry: dict
    pose: Isometry
    synonyms: list[str] = field(default_factory=list)
    attributes: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.id:
            raise ParameterError("scene object id must be non-empty")
        gtype = self.geometry.get("type")
        if gtype not in _PRIMITIVES:
            raise ParameterError(f"object {self.id}: unknown geometry type {gtype!r}")
        if gtype == "mesh":
            if not isinstance(self.geometry.get("mesh"), TriangleMesh):
                raise ParameterError(f"object {self.id}: mesh geometry needs a TriangleMesh")
        else:
            dims = np.asarray(self.geometry.get("dims", ()), dtype=float)
            expected = {"box": 3, "sphere": 1, "cylinder": 2}[gtype]
            if dims.shape != (expected,):
                raise ParameterError(
                    f"object {self.id}: {gtype} needs {expected} dimensions, got {dims.shape}")
            if not np.all(dims > 0):
                raise ParameterError(f"object {self.id}: dimensions must be positive")
            self.geometry = {"type": gtype, "dims": dims}

    def volume(self) -> float:
        g = self.geometry
        if g["type"] == "box":
            return float(np.prod(g["dims"]))
        if g["type"] == "sphere":
            return float(4.0 / 3.0 * np.pi * g["dims"][0] ** 3)
        if g["type"] == "cylinder":
            r, h = g["dims"]
            return float(np.pi * r * r * h)
        return g["mesh"].volume()

    def to_dict(self) -> dict:
        g = self.geometry
        if g["type"] == "mesh":
            geom = {"type": "mesh", "mesh": g["mesh"].to_dict()}
        else:
            geom = {"type": g["type"], "dims": [float(v) for v in g["dims"]]}
        return {"id": self.id, "label": self.label, "synonyms": list(self.synonyms),
                "attributes": list(self.attributes), "geometry": geom,
                "pose": {"xyz": [float(v) for v in self.pose.t],
                         "quat_wxyz": [float(v) for v in self.pose.q]}}

    @classmethod
    def from_dict(cls, d: dict) -> "SceneObject":
        g = d["geometry"]
        if g["type"] == "mesh":
            geometry = {"type": "mesh", "mesh": TriangleMesh.from_dict(g["mesh"])}
        else:
            geometry = {"type": g["type"], "dims": g["dims"]}
        pose = Isometry(np.asarray(d["pose"]["quat_wxyz"], float),
                        np.asarray(d["pose"]["xyz"], float))
        return cls(id=d["id"], label=d["label"], geometry=geometry, pose=pose,
                   synonyms=list(d.get("synonyms", [])),
                   attributes=list(d.get("attributes", [])))


def validate_scene(objects: list[SceneObject]) -> list[SceneObject]:
    ids = [o.id for o in objects]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise ParameterError(f"duplicate scene object ids: {dupes}")
    return objects


def load_scene(path) -> list[SceneObject]:
    data = json.loads(Path(path).read_text())
    return validate_scene([SceneObject.from_dict(od) for od in data["objects"]])


def save_scene(path, objects: list[SceneObject]) -> None:
    validate_scene(objects)
    Path(path).write_text(json.dumps({"objects": [o.to_dict() for o in objects]}, indent=1) + "\n")

"""Robot model, forward kinematics, point Jacobians and world-frame link
capsules.

The model is a joint tree over links. The floating base is an ideal planar
joint (px, py, yaw), so the configuration vector is q = [px, py, psi, joints].
Angular velocity is expressed in world (spatial) coordinates.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .geometry import Capsule, Isometry
from .geometry.isometry import cross3

_EZ = np.array([0.0, 0.0, 1.0])


@dataclass
class Joint:
    name: str
    parent: str
    child: str
    jtype: str  # "revolute" | "prismatic"
    axis: np.ndarray
    origin: Isometry
    limits: tuple[float, float]

    def __post_init__(self):
        if self.jtype not in ("revolute", "prismatic"):
            raise ParameterError(f"joint {self.name}: unknown type {self.jtype!r}")
        self.axis = np.asarray(self.axis, dtype=float).reshape(3)
        norm = np.linalg.norm(self.axis)
        if not np.isfinite(norm) or norm < 1e-12:
            raise ParameterError(f"joint {self.name}: axis must be nonzero")
        self.axis = self.axis / norm
        lo, hi = float(self.limits[0]), float(self.limits[1])
        if not lo < hi:
            raise ParameterError(f"joint {self.name}: limits must satisfy lo < hi")
        self.limits = (lo, hi)

    def motion(self, value: float) -> Isometry:
        if self.jtype == "revolute":
            half = 0.5 * value
            q = np.empty(4)
            q[0] = np.cos(half)
            q[1:] = np.sin(half) * self.axis
            return Isometry._raw(q, np.zeros(3))
        return Isometry._raw(np.array([1.0, 0.0, 0.0, 0.0]), self.axis * value)


@dataclass
class RobotModel:
    base_planar: bool
    joints: list[Joint]
    link_capsules: dict[str, Capsule | None]
    end_effectors: dict[str, str]
    root: str = field(init=False)

    def __post_init__(self):
        children = {j.child for j in self.joints}
        if len(children) != len(self.joints):
            raise ParameterError("robot must be tree-structured: one parent per link")
        parents = {j.parent for j in self.joints}
        roots = sorted((parents | set(self.link_capsules)) - children)
        if len(roots) != 1:
            raise ParameterError(f"robot must have exactly one root link, found {roots}")
        self.root = roots[0]
        known = children | {self.root}
        for j in self.joints:
            if j.parent not in known:
                raise ParameterError(f"joint {j.name}: unknown parent link {j.parent}")
        for side in ("left", "right"):
            if self.end_effectors.get(side) not in known:
                raise ParameterError(f"end effector {side!r} does not name a link")
        # topological order (parents before children)
        order: list[Joint] = []
        resolved = {self.root}
        pending = list(self.joints)
        while pending:
            progressed = False
            for j in list(pending):
                if j.parent in resolved:
                    order.append(j)
                    resolved.add(j.child)
                    pending.remove(j)
                    progressed = True
            if not progressed:
                raise ParameterError("joint tree contains a cycle or orphan")
        self._topo = order
        self._q_index = {j.name: (3 if self.base_planar else 0) + i
                         for i, j in enumerate(self.joints)}
        # chain of joints from root to each link, in topological order
        self._chain: dict[str, list[Joint]] = {self.root: []}
        for j in order:
            self._chain[j.child] = self._chain[j.parent] + [j]

    @property
    def dof(self) -> int:
        return (3 if self.base_planar else 0) + len(self.joints)

    @property
    def link_names(self) -> list[str]:
        return [self.root] + [j.child for j in self._topo]

    def q_index(self, joint_name: str) -> int:
        return self._q_index[joint_name]

    def position_limits(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-DOF position bounds; planar base DOFs are unbounded."""
        lo = np.full(self.dof, -np.inf)
        hi = np.full(self.dof, np.inf)
        for j in self.joints:
            i = self._q_index[j.name]
            lo[i], hi[i] = j.limits
        return lo, hi

    def clamp(self, q: np.ndarray) -> np.ndarray:
        lo, hi = self.position_limits()
        return np.clip(np.asarray(q, dtype=float), lo, hi)

    def check_q(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float).reshape(-1)
        if q.shape[0] != self.dof:
            raise ParameterError(f"configuration has {q.shape[0]} entries, model has {self.dof} DOF")
        if not np.all(np.isfinite(q)):
            raise ParameterError("configuration must be finite")
        return q

    def default_self_pairs(self) -> list[tuple[str, str]]:
        """All unordered pairs of capsule links except each link with its
        nearest capsule-bearing ancestor (those touch by construction)."""
        capsule_links = [n for n in self.link_names if self.link_capsules.get(n) is not None]
        parent_of = {j.child: j.parent for j in self.joints}

        def capsule_ancestor(link: str) -> str | None:
            cur = parent_of.get(link)
            while cur is not None:
                if self.link_capsules.get(cur) is not None:
                    return cur
                cur = parent_of.get(cur)
            return None

        excluded = {frozenset((ln, capsule_ancestor(ln))) for ln in capsule_links
                    if capsule_ancestor(ln) is not None}
        pairs = []
        for i, a in enumerate(capsule_links):
            for b in capsule_links[i + 1:]:
                if frozenset((a, b)) not in excluded:
                    pairs.append((a, b))
        return pairs

    def to_dict(self) -> dict:
        return {
            "base_planar": self.base_planar,
            "joints": [{"name": j.name, "parent": j.parent, "child": j.child,
                        "type": j.jtype, "axis": [float(v) for v in j.axis],
                        "origin": j.origin.to_dict(),
                        "limits": [j.limits[0], j.limits[1]]} for j in self.joints],
            "links": [{"name": n,
                       **({"capsule": c.to_dict()} if c is not None else {})}
                      for n, c in self.link_capsules.items()],
            "end_effectors": dict(self.end_effectors),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RobotModel":
        joints = [Joint(name=jd["name"], parent=jd["parent"], child=jd["child"],
                        jtype=jd["type"], axis=jd["axis"],
                        origin=Isometry.from_dict(jd["origin"]),
                        limits=(jd["limits"][0], jd["limits"][1]))
                  for jd in d["joints"]]
        caps: dict[str, Capsule | None] = {}
        for ld in d["links"]:
            c = ld.get("capsule")
            caps[ld["name"]] = Capsule(c["a"], c["b"], c["r"]) if c else None
        return cls(base_planar=bool(d.get("base_planar", True)), joints=joints,
                   link_capsules=caps, end_effectors=dict(d["end_effectors"]))


def load_robot(path) -> RobotModel:
    return RobotModel.from_dict(json.loads(Path(path).read_text()))


def save_robot(path, model: RobotModel) -> None:
    Path(path).write_text(json.dumps(model.to_dict(), indent=1) + "\n")


def _base_pose(model: RobotModel, q: np.ndarray) -> Isometry:
    if not model.base_planar:
        return Isometry.identity()
    px, py, psi = q[0], q[1], q[2]
    return Isometry(Isometry.from_axis_angle(_EZ, psi).q, np.array([px, py, 0.0]))


def forward_kinematics(model: RobotModel, q) -> dict[str, Isometry]:
    """World pose of every link at configuration q."""
    q = model.check_q(q)
    poses = {model.root: _base_pose(model, q)}
    for j in model._topo:
        value = q[model.q_index(j.name)]
        poses[j.child] = poses[j.parent].compose(j.origin).compose(j.motion(value))
    return poses


def point_jacobian(model: RobotModel, q, link: str, point_world,
                   poses: dict[str, Isometry] | None = None) -> np.ndarray:
    """6 x dof geometric Jacobian of the body-fixed point of `link` currently
    at point_world; rows are (linear; angular), world frame. ``poses`` may
    carry forward_kinematics(model, q) to avoid recomputing it."""
    q = model.check_q(q)
    if link not in model._chain:
        raise ParameterError(f"unknown link {link!r}")
    p = np.asarray(point_world, dtype=float).reshape(3)
    if poses is None:
        poses = forward_kinematics(model, q)
    J = np.zeros((6, model.dof))
    if model.base_planar:
        J[0, 0] = 1.0
        J[1, 1] = 1.0
        o = np.array([q[0], q[1], 0.0])
        J[:3, 2] = cross3(_EZ, p - o)
        J[3:, 2] = _EZ
    for j in model._chain[link]:
        col = model.q_index(j.name)
        frame = poses[j.parent].compose(j.origin)  # joint frame before motion
        axis_w = frame.rotate(j.axis)
        if j.jtype == "prismatic":
            J[:3, col] = axis_w
        else:
            J[:3, col] = cross3(axis_w, p - frame.t)
            J[3:, col] = axis_w
    return J


def world_capsules(model: RobotModel, q,
                   poses: dict[str, Isometry] | None = None) -> list[tuple[str, Capsule]]:
    if poses is None:
        poses = forward_kinematics(model, q)
    out = []
    for name in model.link_names:
        cap = model.link_capsules.get(name)
        if cap is not None:
            out.append((name, cap.transformed(poses[name])))
    return out


def _arm(side: str, sy: float) -> tuple[list[dict], list[dict]]:
    s = side[0]
    def j(name, parent, child, axis, xyz, limits):
        return {"name": name, "parent": parent, "child": child, "type": "revolute",
                "axis": axis, "origin": {"xyz": xyz, "quat_wxyz": [1, 0, 0, 0]},
                "limits": limits}
    joints = [
        j(f"{s}_shoulder_yaw", "torso", f"{s}_shoulder", [0, 0, 1], [0.02, sy, 0.10], [-2.9, 2.9]),
        j(f"{s}_shoulder_pitch", f"{s}_shoulder", f"{s}_upper", [0, 1, 0], [0.03, 0.0, 0.0], [-1.9, 1.9]),
        j(f"{s}_upper_roll", f"{s}_upper", f"{s}_elbow", [1, 0, 0], [0.22, 0.0, 0.0], [-2.8, 2.8]),
        j(f"{s}_elbow_pitch", f"{s}_elbow", f"{s}_fore", [0, 1, 0], [0.08, 0.0, 0.0], [-2.4, 2.4]),
        j(f"{s}_fore_roll", f"{s}_fore", f"{s}_wrist_base", [1, 0, 0], [0.20, 0.0, 0.0], [-2.8, 2.8]),
        j(f"{s}_wrist_pitch", f"{s}_wrist_base", f"{s}_wrist", [0, 1, 0], [0.06, 0.0, 0.0], [-1.6, 1.6]),
        j(f"{s}_wrist_roll", f"{s}_wrist", f"{s}_tool", [1, 0, 0], [0.08, 0.0, 0.0], [-2.2, 2.2]),
    ]
    links = [
        {"name": f"{s}_shoulder", "capsule": {"a": [0, 0, 0], "b": [0, 0, 0], "r": 0.06}},
        {"name": f"{s}_upper", "capsule": {"a": [0.0, 0, 0], "b": [0.22, 0, 0], "r": 0.055}},
        {"name": f"{s}_elbow"},
        {"name": f"{s}_fore", "capsule": {"a": [0.0, 0, 0], "b": [0.20, 0, 0], "r": 0.05}},
        {"name": f"{s}_wrist_base"},
        {"name": f"{s}_wrist", "capsule": {"a": [0, 0, 0], "b": [0.08, 0, 0], "r": 0.045}},
        {"name": f"{s}_tool", "capsule": {"a": [0, 0, 0], "b": [0.10, 0, 0], "r": 0.04}},
    ]
    return joints, links


def bimanual_dict() -> dict:
    """Planar base + prismatic torso + two 7-DOF arms: 18 DOF, 12 capsules.

    Capsule sizes leave every default self pair separated at q = 0 so the
    controller starts outside its own damping constraints.
    """
    lj, ll = _arm("left", 0.23)
    rj, rl = _arm("right", -0.23)
    return {
        "base_planar": True,
        "joints": [{"name": "torso_lift", "parent": "base", "child": "torso",
                    "type": "prismatic", "axis": [0, 0, 1],
                    "origin": {"xyz": [0, 0, 0.60], "quat_wxyz": [1, 0, 0, 0]},
                    "limits": [0.0, 0.35]}] + lj + rj,
        "links": [{"name": "base", "capsule": {"a": [0, 0, 0.15], "b": [0, 0, 0.42], "r": 0.24}},
                  {"name": "torso", "capsule": {"a": [0, 0, -0.25], "b": [0, 0, 0.05], "r": 0.13}}]
                 + ll + rl,
        "end_effectors": {"left": "l_tool", "right": "r_tool"},
    }


def default_robot() -> RobotModel:
    return RobotModel.from_dict(bimanual_dict())

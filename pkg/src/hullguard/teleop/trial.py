"""Deterministic trial replay: the live-vs-replay safety experiment.

A trial re-executes a recorded event stream through the session mapping and
the controller at fixed dt. With avoidance on, registered obstacle meshes
feed the controller's constraint rows; with avoidance off those rows are
omitted while self-protection rows remain. The report's distance series and
collision episodes come from the ground-truth checker, so both modes are
scored identically.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..command import ObstacleRegistry, apply_intent
from ..errors import ReplayIntegrityError
from ..geometry import Isometry
from ..geometry.distance import capsule_convex_distance
from ..kinematics import RobotModel, forward_kinematics, world_capsules
from ..perception import (
    CameraIntrinsics,
    PipelineParams,
    load_scene,
    render_depth_view,
)
from ..wbc import DISTANCE_REPORT_CAP, ControllerParams, control_step
from ..wbc.tasks import CartesianReference
from .collision import detect_collision
from .log import TeleopLog, file_sha256
from .session import TeleopSession
from .workspace import WorkspaceBox

# Conservative sweep volume used when the config pins no workspace: a desk
# footprint around the robot base, generous in height.
DEFAULT_WORKSPACE = {"min": [-0.9, -0.9, 0.0], "max": [0.9, 0.9, 1.8],
                     "margin": 0.1}


@dataclass
class TrialReport:
    collisions: int
    first_collision_t: float | None
    min_distance_series: list[float]
    completion: bool
    collision_pairs: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"collisions": self.collisions,
                "first_collision_t": self.first_collision_t,
                "min_distance_series": [float(v) for v in
                                        self.min_distance_series],
                "completion": self.completion,
                "collision_pairs": [list(p) for p in self.collision_pairs]}


def load_trial_config(path) -> dict:
    config = json.loads(Path(path).read_text())
    out = {
        "controller": ControllerParams.from_dict(config["controller"]),
        "pipeline": PipelineParams.from_dict(config.get("pipeline", {}))
        if config.get("pipeline") else PipelineParams(),
        "intrinsics": CameraIntrinsics.from_dict(config["camera"]["intrinsics"]),
        "camera_pose": Isometry(
            np.asarray(config["camera"]["pose"]["quat_wxyz"], float),
            np.asarray(config["camera"]["pose"]["xyz"], float)),
        "resolution": tuple(config["camera"]["resolution"]),
        "noise_sigma": float(config["camera"].get("noise_sigma", 0.0)),
        "workspace": WorkspaceBox.from_dict(
            config.get("workspace", DEFAULT_WORKSPACE)),
        "q0": np.asarray(config["q0"], float) if "q0" in config else None,
        "motion_scale": float(config.get("motion_scale", 1.0)),
    }
    return out


def _registry_min_distance(model, q, meshes, poses) -> float:
    """Ground-truth minimum capsule-to-registered-mesh distance this step."""
    best = DISTANCE_REPORT_CAP
    for _, capsule in world_capsules(model, q, poses=poses):
        mid = 0.5 * (capsule.endpoint_a + capsule.endpoint_b)
        reach = 0.5 * np.linalg.norm(
            capsule.endpoint_b - capsule.endpoint_a) + capsule.radius
        for mesh in meshes.values():
            center = mesh.vertices.mean(axis=0)
            bound = np.linalg.norm(mesh.vertices - center, axis=1).max()
            if np.linalg.norm(mid - center) - reach - bound >= best:
                continue
            _, _, d = capsule_convex_distance(capsule, mesh)
            if d < best:
                best = float(d)
    return float(best)


def run_trial(log: TeleopLog, avoidance: bool, scene_path, robot_path,
              config_path) -> TrialReport:
    """Replay a recorded log against pinned scene/robot/config files."""
    mismatches = [
        name for name, path, expected in (
            ("scene", scene_path, log.header.scene_sha256),
            ("robot", robot_path, log.header.robot_sha256),
            ("config", config_path, log.header.config_sha256))
        if file_sha256(path) != expected]
    if mismatches:
        raise ReplayIntegrityError(
            f"log was recorded against different file(s): {mismatches}")

    scene = load_scene(scene_path)
    model = RobotModel.from_dict(json.loads(Path(robot_path).read_text()))
    cfg = load_trial_config(config_path)
    params: ControllerParams = cfg["controller"]
    q = model.clamp(cfg["q0"] if cfg["q0"] is not None
                    else np.zeros(model.dof))

    view = render_depth_view(scene, cfg["camera_pose"], cfg["intrinsics"],
                             cfg["resolution"], noise_sigma=cfg["noise_sigma"],
                             seed=log.header.seed)
    registry = ObstacleRegistry()

    poses = forward_kinematics(model, q)
    session = TeleopSession({"left": poses[model.end_effectors["left"]],
                             "right": poses[model.end_effectors["right"]]},
                            workspace=cfg["workspace"],
                            motion_scale=cfg["motion_scale"])

    timeline = sorted(
        [(t, 0, intent) for t, intent in log.intents] +
        [(e.t, 1, e) for e in log.events],
        key=lambda item: (item[0], item[1]))
    cursor = 0
    dt = params.dt
    n_steps = int(round(log.horizon() / dt)) + 1

    collisions = 0
    first_collision_t = None
    colliding_prev = False
    series = []
    pairs = []
    for k in range(n_steps):
        sim_t = k * dt
        while cursor < len(timeline) and timeline[cursor][0] <= sim_t + 1e-12:
            _, kind, item = timeline[cursor]
            cursor += 1
            if kind == 0:
                apply_intent(registry, item, scene, view, cfg["pipeline"],
                             now_ms=int(round(sim_t * 1000)))
            else:
                session.map_input(item)
        meshes = {oid: cm.mesh for oid, cm in registry.active.items()}
        refs = {"left": CartesianReference(target=session.targets["left"]),
                "right": CartesianReference(target=session.targets["right"])}
        q, _ = control_step(model, q, refs, meshes if avoidance else {},
                            params)
        poses = forward_kinematics(model, q)
        series.append(_registry_min_distance(model, q, meshes, poses))
        hit, pair, _ = detect_collision(model, q, scene, poses=poses)
        if hit and not colliding_prev:
            collisions += 1
            pairs.append(pair)
            if first_collision_t is None:
                first_collision_t = sim_t
        colliding_prev = hit
    return TrialReport(collisions=collisions,
                       first_collision_t=first_collision_t,
                       min_distance_series=series, completion=True,
                       collision_pairs=pairs)

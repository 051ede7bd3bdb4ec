"""One whole-body control step: tasks + constraints -> QP -> integrate.

Infeasible constraint sets degrade safely: task velocities are scaled down
and the solve retried; if every retry fails the step commands zero motion.
Scaling cannot enlarge the feasible set (it only changes the objective), so
the ladder mainly absorbs numerical failures; the zero-motion floor is the
actual safety guarantee. control_step never raises to the caller for solver
trouble.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import InfeasibleError, ParameterError, SolverError
from ..kinematics import RobotModel, forward_kinematics, point_jacobian
from .constraints import DampingParams, collect_constraints
from .qp import solve_qp
from .tasks import (CartesianReference, assemble_qp, cartesian_velocity_command,
                    integration_bounds)

TASK_SCALE_LADDER = (1.0, 0.5, 0.25, 0.125)


@dataclass
class ControllerParams:
    dt: float = 0.01
    d_s: float = 0.05
    damping_gain: float = 0.5
    buffer: float = 0.1
    weights: dict = field(default_factory=lambda: {"left": 1.0, "right": 1.0, "postural": 1e-3})
    k_p: float = 1.0
    q_nominal: np.ndarray | None = None
    qd_max: float = 2.0

    def __post_init__(self):
        if self.q_nominal is not None:
            self.q_nominal = np.asarray(self.q_nominal, dtype=float).reshape(-1)
        for key in ("left", "right", "postural"):
            if key not in self.weights:
                raise ParameterError(f"weights must define {key!r}")
        if self.qd_max <= 0:
            raise ParameterError("qd_max must be positive")

    def damping(self) -> DampingParams:
        return DampingParams(activation_distance=self.d_s, gain=self.damping_gain,
                             dt=self.dt, buffer=self.buffer)

    def to_dict(self) -> dict:
        d = {"dt": self.dt, "d_s": self.d_s, "damping_gain": self.damping_gain,
             "buffer": self.buffer, "weights": dict(self.weights), "k_p": self.k_p,
             "qd_max": self.qd_max}
        if self.q_nominal is not None:
            d["q_nominal"] = [float(v) for v in self.q_nominal]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ControllerParams":
        kwargs = {k: d[k] for k in ("dt", "d_s", "damping_gain", "buffer", "weights",
                                    "k_p", "q_nominal", "qd_max") if k in d}
        return cls(**kwargs)


def load_controller_config(path) -> ControllerParams:
    return ControllerParams.from_dict(json.loads(Path(path).read_text()))


@dataclass
class StepReport:
    qd: np.ndarray
    kkt_residual: float
    active_set: tuple
    min_distances: dict
    n_rows: int
    task_scale: float  # 0.0 means the zero-motion fallback was taken

    def to_dict(self) -> dict:
        return {"qd": [float(v) for v in self.qd],
                "kkt_residual": float(self.kkt_residual),
                "active_set": list(self.active_set),
                "min_distances": {k: float(v) for k, v in self.min_distances.items()},
                "n_rows": self.n_rows,
                "task_scale": self.task_scale}


def control_step(model: RobotModel, q, refs: dict, meshes, params: ControllerParams,
                 self_pairs=None):
    """Advance q by one control period. refs maps "left"/"right" to a
    CartesianReference or None. Returns (q_new, StepReport)."""
    q = model.check_q(q)
    if self_pairs is None:
        self_pairs = model.default_self_pairs()
    poses = forward_kinematics(model, q)
    tasks = []
    for side in ("left", "right"):
        ref = refs.get(side)
        if ref is None:
            continue
        if not isinstance(ref, CartesianReference):
            raise ParameterError(f"refs[{side!r}] must be a CartesianReference")
        ee_link = model.end_effectors[side]
        current = poses[ee_link]
        v6 = cartesian_velocity_command(current, ref)
        J = point_jacobian(model, q, ee_link, current.t, poses=poses)
        tasks.append((J, v6, params.weights[side]))
    rows = collect_constraints(model, q, meshes, self_pairs, params.damping(),
                               poses=poses)
    q_lo, q_hi = model.position_limits()
    bounds = integration_bounds(q, q_lo, q_hi, params.qd_max, params.dt)
    q_nom = params.q_nominal if params.q_nominal is not None else np.zeros(model.dof)
    postural = (q_nom, params.weights["postural"])

    qd = np.zeros(model.dof)
    kkt = 0.0
    active: tuple = ()
    used_scale = 0.0
    for scale in TASK_SCALE_LADDER:
        scaled_tasks = [(J, scale * v, w) for J, v, w in tasks]
        problem = assemble_qp(scaled_tasks, postural=postural, limits=bounds,
                              rows=rows, current_q=q, k_p=scale * params.k_p)
        try:
            qd, kkt, active = solve_qp(problem)
            used_scale = scale
            break
        except (InfeasibleError, SolverError):
            continue
    report = StepReport(qd=qd, kkt_residual=kkt, active_set=active,
                        min_distances=dict(rows.distances), n_rows=len(rows),
                        task_scale=used_scale)
    return q + qd * params.dt, report

"""Cartesian task errors and QP assembly for the whole-body controller."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ParameterError
from ..geometry import Isometry, quat_conjugate, quat_multiply, quat_to_axis_angle
from .qp import REGULARIZATION, QpProblem


@dataclass
class CartesianReference:
    """Pose target with feedforward twist and a 6x6 diagonal gain K (linear
    block first)."""

    target: Isometry
    feedforward_linear: np.ndarray = field(default_factory=lambda: np.zeros(3))
    feedforward_angular: np.ndarray = field(default_factory=lambda: np.zeros(3))
    gain: np.ndarray = field(default_factory=lambda: np.eye(6))

    def __post_init__(self):
        self.feedforward_linear = np.asarray(self.feedforward_linear, dtype=float).reshape(3)
        self.feedforward_angular = np.asarray(self.feedforward_angular, dtype=float).reshape(3)
        gain = np.asarray(self.gain, dtype=float)
        if gain.shape == (6,):
            gain = np.diag(gain)
        if gain.shape != (6, 6):
            raise ParameterError("gain must be a 6x6 diagonal matrix or 6-vector")
        if np.any(gain - np.diag(np.diag(gain)) != 0.0):
            raise ParameterError("gain must be diagonal")
        if np.any(np.diag(gain) < 0.0) or not np.all(np.isfinite(np.diag(gain))):
            raise ParameterError("gain diagonal must be finite and >= 0")
        self.gain = gain


def orientation_error(q_ref: np.ndarray, q_cur: np.ndarray) -> np.ndarray:
    """Axis*angle of the rotation taking the current orientation to the
    reference, shortest arc, angle in [0, pi]."""
    q_err = quat_multiply(q_ref, quat_conjugate(q_cur))
    return quat_to_axis_angle(q_err)


def cartesian_velocity_command(current: Isometry, ref: CartesianReference) -> np.ndarray:
    """Desired 6-velocity (linear; angular) of the end effector."""
    e = np.empty(6)
    e[:3] = ref.target.t - current.t
    e[3:] = orientation_error(ref.target.q, current.q)
    v = np.empty(6)
    v[:3] = ref.feedforward_linear
    v[3:] = ref.feedforward_angular
    return v + ref.gain @ e


@dataclass
class VelocityBounds:
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        self.lo = np.asarray(self.lo, dtype=float).reshape(-1)
        self.hi = np.asarray(self.hi, dtype=float).reshape(-1)
        if self.lo.shape != self.hi.shape:
            raise ParameterError("bound vectors must have equal length")


def integration_bounds(q, q_lo, q_hi, qd_max, dt: float) -> VelocityBounds:
    """Velocity bounds that keep q + qd*dt inside position limits: the
    integrated configuration can never cross a joint limit."""
    q = np.asarray(q, dtype=float)
    qd_max = np.broadcast_to(np.asarray(qd_max, dtype=float), q.shape)
    if np.any(qd_max <= 0):
        raise ParameterError("qd_max must be positive")
    if dt <= 0:
        raise ParameterError("dt must be positive")
    lo = np.maximum(-qd_max, (np.asarray(q_lo, dtype=float) - q) / dt)
    hi = np.minimum(qd_max, (np.asarray(q_hi, dtype=float) - q) / dt)
    return VelocityBounds(lo, hi)


def assemble_qp(tasks, postural=None, limits: VelocityBounds | None = None,
                rows=(), current_q=None, k_p: float = 1.0) -> QpProblem:
    """Weighted single-level QP over joint velocities.

    tasks: iterable of (jacobian, desired velocity, weight).
    postural: optional (q_nominal, weight); needs current_q. Its desired
    velocity is k_p * (q_nominal - current_q).
    rows: inequality rows; items may carry metadata beyond (a, b).
    """
    tasks = list(tasks)
    if not tasks and postural is None:
        raise ParameterError("at least one task (or the postural task) is required")
    if tasks:
        dof = np.asarray(tasks[0][0]).shape[1]
    else:
        dof = np.asarray(postural[0]).reshape(-1).shape[0]
    H = np.zeros((dof, dof))
    g = np.zeros(dof)
    for J, v, w in tasks:
        J = np.asarray(J, dtype=float)
        v = np.asarray(v, dtype=float).reshape(-1)
        if J.shape != (v.shape[0], dof):
            raise ParameterError("task jacobian/velocity dimension mismatch")
        if w < 0:
            raise ParameterError("task weights must be >= 0")
        H += w * (J.T @ J)
        g -= w * (J.T @ v)
    if postural is not None:
        q_nom, w_p = postural
        if current_q is None:
            raise ParameterError("postural task requires current_q")
        q_nom = np.asarray(q_nom, dtype=float).reshape(dof)
        v_p = k_p * (q_nom - np.asarray(current_q, dtype=float).reshape(dof))
        H += w_p * np.eye(dof)
        g -= w_p * v_p
    H += REGULARIZATION * np.eye(dof)
    qp_rows = [(np.asarray(r[0], dtype=float), float(r[1])) for r in rows]
    lo = hi = None
    if limits is not None:
        lo, hi = limits.lo, limits.hi
    return QpProblem(hessian=H, gradient=g, rows=qp_rows, lo=lo, hi=hi)

"""Velocity-damping collision constraints.

Each near pair (link capsule vs link capsule, or link capsule vs obstacle
mesh) contributes one inequality on the joint velocity:

    n' (J1_lin - J2_lin) qdot <= gain * (d - d_s) / dt

with n the unit direction from body 1 toward body 2 at the closest points.
At d = d_s the admissible approach velocity is exactly zero; below d_s the
bound goes negative and forces the pair apart. Obstacles are static, so their
Jacobian is zero.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..errors import ParameterError
from ..geometry import capsule_capsule_distance, capsule_convex_witness, segment_segment_closest
from ..kinematics import RobotModel, point_jacobian, world_capsules

DISTANCE_REPORT_CAP = 0.5  # meters; far-field distances saturate here
# Rows with max |a_i| below this carry no usable information: the pair's
# distance is first-order stationary in every joint (e.g. two collinear
# capsule cores), so no velocity satisfies or violates them meaningfully.
GRADIENT_FLOOR = 1e-6


@dataclass
class DampingParams:
    activation_distance: float = 0.05  # d_s
    gain: float = 0.5
    dt: float = 0.01
    buffer: float = 0.1  # rows are emitted within d_s + buffer

    def __post_init__(self):
        if self.activation_distance <= 0:
            raise ParameterError("activation_distance must be > 0")
        if not 0 < self.gain <= 1:
            raise ParameterError("gain must be in (0, 1]")
        if self.dt <= 0:
            raise ParameterError("dt must be > 0")
        if self.buffer < 0:
            raise ParameterError("buffer must be >= 0")


class ConstraintRow(NamedTuple):
    a: np.ndarray
    b: float
    source: str
    distance: float


class ConstraintRows(list):
    """List of ConstraintRow with a ``distances`` report attached."""

    distances: dict[str, float]


def damping_constraint_row(n_cp, J_cp1, J_cp2, d: float, params: DampingParams):
    """One inequality row (a, b). J_cp2 may be None for a static obstacle."""
    n_cp = np.asarray(n_cp, dtype=float).reshape(3)
    if abs(np.linalg.norm(n_cp) - 1.0) > 1e-9:
        raise ParameterError("n_cp must be a unit vector")
    if not np.isfinite(d):
        raise ParameterError("distance must be finite")
    J1 = np.asarray(J_cp1, dtype=float)
    rel = J1[:3].copy()
    if J_cp2 is not None:
        rel -= np.asarray(J_cp2, dtype=float)[:3]
    a = n_cp @ rel
    b = params.gain * (d - params.activation_distance) / params.dt
    return a, float(b)


def collect_constraints(model: RobotModel, q, meshes, self_pairs,
                        params: DampingParams, poses=None) -> list[ConstraintRow]:
    """Damping rows for every active pair within d_s + buffer.

    meshes: mapping obstacle id -> convex TriangleMesh (world frame).
    self_pairs: iterable of (link_a, link_b) capsule link names.
    Rows carry their source tag and signed distance for reporting; the
    ``distances`` attribute set on the returned list maps each source to its
    minimum observed distance (saturated at DISTANCE_REPORT_CAP).
    """
    q = model.check_q(q)
    margin = params.activation_distance + params.buffer
    caps = dict(world_capsules(model, q, poses=poses))
    rows: list[ConstraintRow] = []
    distances: dict[str, float] = {}

    def note(source: str, d: float):
        d = min(d, DISTANCE_REPORT_CAP)
        if source not in distances or d < distances[source]:
            distances[source] = d

    for link_a, link_b in self_pairs:
        c1 = caps.get(link_a)
        c2 = caps.get(link_b)
        if c1 is None or c2 is None:
            raise ParameterError(f"self pair ({link_a}, {link_b}) names a link without a capsule")
        cp1, cp2, d, n = capsule_capsule_distance(c1, c2)
        note("self", d)
        if d < margin:
            J1 = point_jacobian(model, q, link_a, cp1, poses=poses)
            J2 = point_jacobian(model, q, link_b, cp2, poses=poses)
            a, b = damping_constraint_row(n, J1, J2, d, params)
            if np.max(np.abs(a)) > GRADIENT_FLOOR:
                rows.append(ConstraintRow(a, b, f"self:{link_a}|{link_b}", d))

    for obstacle_id, mesh in meshes.items():
        source = f"mesh:{obstacle_id}"
        center, radius = mesh.bounding_radius()
        best = np.inf
        for link, cap in caps.items():
            # cheap lower bound before the exact query
            _, _, seg_to_center = segment_segment_closest(
                cap.endpoint_a, cap.endpoint_b, center, center)
            lower = seg_to_center - radius - cap.radius
            if lower > margin:
                best = min(best, lower)
                continue
            cp_link, cp_obs, d, n = capsule_convex_witness(cap, mesh)
            best = min(best, d)
            if d < margin:
                J1 = point_jacobian(model, q, link, cp_link, poses=poses)
                a, b = damping_constraint_row(n, J1, None, d, params)
                if np.max(np.abs(a)) > GRADIENT_FLOOR:
                    rows.append(ConstraintRow(a, b, f"{source}|{link}", d))
        note(source, best)

    out = ConstraintRows(rows)
    out.distances = distances
    return out

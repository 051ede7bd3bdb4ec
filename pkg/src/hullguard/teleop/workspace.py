"""Workspace sweep calibration and boundary haptics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import CalibrationError, DegenerateGeometryError, ParameterError
from ..geometry import Isometry
from ..geometry.hull import convex_hull

DEFAULT_MARGIN = 0.1


@dataclass
class WorkspaceBox:
    min: np.ndarray
    max: np.ndarray
    margin: float = DEFAULT_MARGIN

    def __post_init__(self):
        self.min = np.asarray(self.min, dtype=float)
        self.max = np.asarray(self.max, dtype=float)
        if self.min.shape != (3,) or self.max.shape != (3,):
            raise ParameterError("workspace bounds must be 3-vectors")
        if not np.all(self.min < self.max):
            raise ParameterError("workspace min must be strictly below max")
        if self.margin < 0:
            raise ParameterError("margin must be non-negative")

    def contains(self, point) -> bool:
        p = np.asarray(point, dtype=float)
        return bool(np.all(p >= self.min) and np.all(p <= self.max))

    def boundary_distance(self, point) -> float:
        """Distance to the nearest face; negative when outside."""
        p = np.asarray(point, dtype=float)
        return float(np.minimum(p - self.min, self.max - p).min())

    def to_dict(self) -> dict:
        return {"min": [float(v) for v in self.min],
                "max": [float(v) for v in self.max], "margin": self.margin}

    @classmethod
    def from_dict(cls, d: dict) -> "WorkspaceBox":
        return cls(d["min"], d["max"], d.get("margin", DEFAULT_MARGIN))


def calibrate_workspace(samples: list[Isometry],
                        margin: float = DEFAULT_MARGIN) -> WorkspaceBox:
    """Fit the axis-aligned box spanned by a calibration sweep.

    The hull of the sample positions is computed first so that degenerate
    sweeps (coplanar or collinear paths) are rejected with a prompt to sweep a
    wider volume; the box itself is the hull's componentwise extent.
    """
    positions = np.array([s.t for s in samples], dtype=float) \
        if samples else np.empty((0, 3))
    if len(positions) < 4:
        raise CalibrationError(
            f"need at least 4 sweep poses, got {len(positions)}")
    try:
        hull = convex_hull(positions)
    except DegenerateGeometryError as exc:
        raise CalibrationError(
            f"sweep too flat to span a volume ({exc.mode}); "
            "move the controller through a wider region") from None
    return WorkspaceBox(hull.vertices.min(axis=0), hull.vertices.max(axis=0),
                        margin)


def proximity_event(box: WorkspaceBox, pose: Isometry) -> float:
    """Haptic intensity in [0, 1]: silent deep inside, saturated at the wall."""
    dist = box.boundary_distance(pose.t)
    if dist <= 0.0:
        return 1.0
    if dist >= box.margin or box.margin == 0.0:
        return 0.0
    return 1.0 - dist / box.margin

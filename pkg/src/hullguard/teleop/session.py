"""Operator session: clutch-relative motion mapping, gripper, speech relay.

Motion mapping is absolute-from-press: while the clutch is held, the arm
target equals the target captured at clutch press composed with the tracker's
displacement since the press. The event that presses the clutch therefore
produces exactly zero delta, and releasing freezes the reference — there is
no pose jump however far the tracker moved while disengaged.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import NotCalibratedError, ParameterError
from ..geometry import Isometry
from ..geometry.isometry import quat_conjugate, quat_multiply
from .workspace import (
    DEFAULT_MARGIN,
    WorkspaceBox,
    calibrate_workspace,
    proximity_event,
)

HANDS = ("left", "right")


@dataclass
class DeviceEvent:
    t: float
    hand: str
    pose: Isometry
    clutch: bool = False
    gripper_toggle: bool = False
    speak: bool = False
    payload: str | None = None

    def __post_init__(self):
        if self.hand not in HANDS:
            raise ParameterError(f"hand must be left or right, got {self.hand!r}")
        if not np.isfinite(self.t) or self.t < 0:
            raise ParameterError("event time must be finite and non-negative")

    def to_dict(self) -> dict:
        return {"type": "event", "t": self.t, "hand": self.hand,
                "pose": {"xyz": [float(v) for v in self.pose.t],
                         "quat_wxyz": [float(v) for v in self.pose.q]},
                "buttons": {"clutch": self.clutch,
                            "gripper_toggle": self.gripper_toggle,
                            "speak": self.speak},
                "payload": self.payload}

    @classmethod
    def from_dict(cls, d: dict) -> "DeviceEvent":
        buttons = d.get("buttons", {})
        pose = Isometry(np.asarray(d["pose"]["quat_wxyz"], float),
                        np.asarray(d["pose"]["xyz"], float))
        return cls(t=float(d["t"]), hand=d["hand"], pose=pose,
                   clutch=bool(buttons.get("clutch", False)),
                   gripper_toggle=bool(buttons.get("gripper_toggle", False)),
                   speak=bool(buttons.get("speak", False)),
                   payload=d.get("payload"))


@dataclass
class SessionUpdate:
    hand: str
    target: Isometry
    gripper: bool
    transcript: str | None
    haptic: float


class TeleopSession:
    """Per-operator state: arm targets, clutch latches, gripper toggles."""

    def __init__(self, initial_targets: dict[str, Isometry],
                 workspace: WorkspaceBox | None = None,
                 motion_scale: float = 1.0):
        if motion_scale <= 0:
            raise ParameterError("motion_scale must be positive")
        missing = set(HANDS) - set(initial_targets)
        if missing:
            raise ParameterError(f"initial targets missing for: {sorted(missing)}")
        self.workspace = workspace
        self.motion_scale = motion_scale
        self.targets = {h: initial_targets[h] for h in HANDS}
        self.gripper = {h: False for h in HANDS}
        self._clutch_down = {h: False for h in HANDS}
        self._press_tracker: dict[str, Isometry] = {}
        self._press_target: dict[str, Isometry] = {}
        self._last_t = {h: 0.0 for h in HANDS}

    def calibrate(self, samples, margin: float | None = None) -> WorkspaceBox:
        self.workspace = calibrate_workspace(
            samples, DEFAULT_MARGIN if margin is None else margin)
        return self.workspace

    def map_input(self, event: DeviceEvent) -> SessionUpdate:
        if self.workspace is None:
            raise NotCalibratedError(
                "workspace not calibrated; run the sweep first")
        hand = event.hand
        if event.t < self._last_t[hand]:
            raise ParameterError(
                f"{hand} events must have non-decreasing time "
                f"({event.t} after {self._last_t[hand]})")
        self._last_t[hand] = event.t

        if event.gripper_toggle:
            self.gripper[hand] = not self.gripper[hand]
        transcript = event.payload if (event.speak and event.payload) else None

        if event.clutch:
            if not self._clutch_down[hand]:
                # press edge: latch both poses, emit zero delta
                self._press_tracker[hand] = event.pose
                self._press_target[hand] = self.targets[hand]
            else:
                press = self._press_tracker[hand]
                base = self._press_target[hand]
                dp = self.motion_scale * (event.pose.t - press.t)
                dq = quat_multiply(event.pose.q, quat_conjugate(press.q))
                self.targets[hand] = Isometry(quat_multiply(dq, base.q),
                                              base.t + dp)
        self._clutch_down[hand] = event.clutch

        return SessionUpdate(hand=hand, target=self.targets[hand],
                             gripper=self.gripper[hand], transcript=transcript,
                             haptic=proximity_event(self.workspace, event.pose))

"""Operator session layer: input mapping, calibration, logging, replay."""
from .collision import capsule_object_signed_distance, detect_collision
from .log import LogHeader, TeleopLog, file_sha256
from .session import DeviceEvent, SessionUpdate, TeleopSession
from .trial import DEFAULT_WORKSPACE, TrialReport, load_trial_config, run_trial
from .workspace import (
    DEFAULT_MARGIN,
    WorkspaceBox,
    calibrate_workspace,
    proximity_event,
)

__all__ = [
    "DEFAULT_MARGIN",
    "DEFAULT_WORKSPACE",
    "DeviceEvent",
    "LogHeader",
    "SessionUpdate",
    "TeleopLog",
    "TeleopSession",
    "TrialReport",
    "WorkspaceBox",
    "calibrate_workspace",
    "capsule_object_signed_distance",
    "detect_collision",
    "file_sha256",
    "load_trial_config",
    "proximity_event",
    "run_trial",
]

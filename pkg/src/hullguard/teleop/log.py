"""Trial logs: JSON-lines with a hash-pinned header.

Line 1 is the header carrying sha256 hashes of the scene, robot, and config
files plus the noise seed; every following line is one device event or one
intent, in time order. Replays verify the hashes so a log can never silently
run against drifted inputs.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..command import Intent
from ..errors import ParameterError
from .session import DeviceEvent


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class LogHeader:
    scene_sha256: str
    robot_sha256: str
    config_sha256: str
    seed: int

    def to_dict(self) -> dict:
        return {"type": "header", "scene_sha256": self.scene_sha256,
                "robot_sha256": self.robot_sha256,
                "config_sha256": self.config_sha256, "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "LogHeader":
        return cls(d["scene_sha256"], d["robot_sha256"], d["config_sha256"],
                   int(d["seed"]))

    @classmethod
    def for_files(cls, scene_path, robot_path, config_path,
                  seed: int = 0) -> "LogHeader":
        return cls(file_sha256(scene_path), file_sha256(robot_path),
                   file_sha256(config_path), seed)


@dataclass
class TeleopLog:
    header: LogHeader
    events: list[DeviceEvent] = field(default_factory=list)
    intents: list[tuple[float, Intent]] = field(default_factory=list)

    def __post_init__(self):
        last = {}
        for e in self.events:
            if e.t < last.get(e.hand, 0.0):
                raise ParameterError(
                    f"{e.hand} event times must be non-decreasing")
            last[e.hand] = e.t

    def horizon(self) -> float:
        times = [e.t for e in self.events] + [t for t, _ in self.intents]
        return max(times, default=0.0)

    def save(self, path) -> None:
        lines = [json.dumps(self.header.to_dict())]
        for e in self.events:
            lines.append(json.dumps(e.to_dict()))
        for t, intent in self.intents:
            record = {"type": "intent", "t": t, "raw_text": intent.raw_text}
            record.update(intent.to_wire())
            lines.append(json.dumps(record))
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path) -> "TeleopLog":
        lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
        if not lines:
            raise ParameterError(f"empty log file: {path}")
        head = json.loads(lines[0])
        if head.get("type") != "header":
            raise ParameterError("first log line must be the header")
        events, intents = [], []
        for ln in lines[1:]:
            record = json.loads(ln)
            kind = record.get("type")
            if kind == "event":
                events.append(DeviceEvent.from_dict(record))
            elif kind == "intent":
                intent = Intent.from_wire(
                    {k: record[k] for k in ("v", "enable", "disable")},
                    raw_text=record.get("raw_text", ""))
                intents.append((float(record["t"]), intent))
            else:
                raise ParameterError(f"unknown log line type: {kind!r}")
        return cls(LogHeader.from_dict(head), events, intents)

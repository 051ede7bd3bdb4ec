"""Structured avoidance intent and its frozen wire schema.

The wire form is exactly {"v": 1, "enable": [...], "disable": [...]}; the
dataclass additionally carries the raw transcript and a fallback marker for
auditing, which never leave the process.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ParameterError, ProtocolError

WIRE_VERSION = 1


@dataclass
class Intent:
    enable: list[str] = field(default_factory=list)
    disable: list[str] = field(default_factory=list)
    raw_text: str = ""
    via_fallback: bool = False
    fallback_reason: str | None = None

    def __post_init__(self):
        self.enable = [p.strip().lower() for p in self.enable]
        self.disable = [p.strip().lower() for p in self.disable]
        if not self.enable and not self.disable:
            raise ParameterError("intent must enable or disable at least one phrase")
        if any(not p for p in self.enable + self.disable):
            raise ParameterError("intent phrases must be non-empty")

    def to_wire(self) -> dict:
        return {"v": WIRE_VERSION, "enable": list(self.enable),
                "disable": list(self.disable)}

    @classmethod
    def from_wire(cls, data, raw_text: str = "") -> "Intent":
        """Strictly validate an external reply against the frozen schema."""
        if not isinstance(data, dict):
            raise ProtocolError("intent reply must be a JSON object")
        if data.get("v") != WIRE_VERSION:
            raise ProtocolError(f"unsupported intent version: {data.get('v')!r}")
        unknown = set(data) - {"v", "enable", "disable"}
        if unknown:
            raise ProtocolError(f"unknown intent fields: {sorted(unknown)}")
        lists = {}
        for key in ("enable", "disable"):
            val = data.get(key, [])
            if not isinstance(val, list) or not all(isinstance(p, str) for p in val):
                raise ProtocolError(f"{key} must be a list of strings")
            lists[key] = val
        if not lists["enable"] and not lists["disable"]:
            raise ProtocolError("intent reply enables/disables nothing")
        if any(not p.strip() for p in lists["enable"] + lists["disable"]):
            raise ProtocolError("intent phrases must be non-empty")
        return cls(enable=lists["enable"], disable=lists["disable"],
                   raw_text=raw_text)

"""Operator text to avoidance intents and the active-obstacle registry."""
from .intent import WIRE_VERSION, Intent
from .parse import (
    EDIT_DISTANCE_THRESHOLD,
    correct_phrase,
    edit_distance,
    normalized_edit_distance,
    parse_transcript,
    phonetic_key,
)
from .registry import ObstacleRegistry, apply_intent
from .resolve import external_model_resolve

__all__ = [
    "EDIT_DISTANCE_THRESHOLD",
    "Intent",
    "ObstacleRegistry",
    "WIRE_VERSION",
    "apply_intent",
    "correct_phrase",
    "edit_distance",
    "normalized_edit_distance",
    "external_model_resolve",
    "parse_transcript",
    "phonetic_key",
]

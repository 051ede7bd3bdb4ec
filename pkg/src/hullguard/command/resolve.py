"""Optional external language-model pathway with mandatory local fallback.

The endpoint gets {"v":1,"transcript","vocabulary"} and must answer with the
frozen intent schema within the timeout. Any failure — unreachable host,
timeout, malformed JSON, schema violation — falls back to the local rule
grammar and marks the returned intent, so avoidance never depends on the
network.
"""
from __future__ import annotations

import json
import urllib.error
import urllib.request

from ..errors import ProtocolError, UnparseableError
from .intent import WIRE_VERSION, Intent
from .parse import parse_transcript

DEFAULT_TIMEOUT_S = 2.0


def external_model_resolve(transcript: str, scene_vocabulary: list[str],
                           endpoint: str,
                           timeout_s: float = DEFAULT_TIMEOUT_S) -> Intent:
    """POST the transcript to the resolver endpoint, falling back locally."""
    payload = json.dumps({"v": WIRE_VERSION, "transcript": transcript,
                          "vocabulary": list(scene_vocabulary)}).encode()
    request = urllib.request.Request(
        endpoint, data=payload, headers={"Content-Type": "application/json"},
        method="POST")
    try:
        with urllib.request.urlopen(request, timeout=timeout_s) as response:
            body = response.read()
        data = json.loads(body)
        return Intent.from_wire(data, raw_text=transcript)
    except ProtocolError as exc:
        reason = f"schema-invalid reply: {exc}"
    except (urllib.error.URLError, OSError, TimeoutError) as exc:
        reason = f"endpoint unreachable: {exc}"
    except (json.JSONDecodeError, ValueError) as exc:
        reason = f"non-JSON reply: {exc}"
    intent = parse_transcript(transcript, scene_vocabulary)
    intent.via_fallback = True
    intent.fallback_reason = reason
    return intent

"""Map a noun phrase to scene objects by lexical overlap.

Scoring per object: 3 when the object's label appears in the phrase as a
contiguous token run, plus 2 when any synonym appears, plus 1 for each
attribute word present anywhere in the phrase. All objects tied at the
maximal positive score are returned, in scene order; no overlap at all
yields an empty list.
"""
from __future__ import annotations

import string

from .scene import SceneObject

_STRIP = str.maketrans("", "", string.punctuation)


def _tokens(text: str) -> list[str]:
    return text.lower().translate(_STRIP).split()


def _contains_run(haystack: list[str], needle: list[str]) -> bool:
    if not needle or len(needle) > len(haystack):
        return False
    return any(haystack[i:i + len(needle)] == needle
               for i in range(len(haystack) - len(needle) + 1))


def score_object(phrase_tokens: list[str], obj: SceneObject) -> int:
    score = 0
    if _contains_run(phrase_tokens, _tokens(obj.label)):
        score += 3
    if any(_contains_run(phrase_tokens, _tokens(s)) for s in obj.synonyms):
        score += 2
    token_set = set(phrase_tokens)
    for attr in obj.attributes:
        score += sum(1 for w in _tokens(attr) if w in token_set)
    return score


def ground_phrase(phrase: str, scene: list[SceneObject]) -> list[SceneObject]:
    """Return every scene object achieving the maximal positive match score."""
    toks = _tokens(phrase)
    scores = [score_object(toks, obj) for obj in scene]
    best = max(scores, default=0)
    if best <= 0:
        return []
    return [obj for obj, s in zip(scene, scores) if s == best]

"""Rule-grammar transcript parsing with transcription-error recovery.

A command is one or more verb clauses; each clause's object phrases are the
token runs after the verb, split on "and"/commas, with grammatical filler
stripped from the ends. Phrases are snapped to the known vocabulary by
normalized edit distance, and failing that by phonetic-key equality, so
near-miss transcriptions ("monster" for "mustard") still land on the right
object.
"""
from __future__ import annotations

import string

from ..errors import UnparseableError
from .intent import Intent

ENABLE_VERBS = frozenset({"avoid", "add", "enable", "watch"})
DISABLE_VERBS = frozenset({"remove", "disable", "ignore", "clear"})
# Words that carry grammar, not object identity; stripped from phrase ends.
_FILLER = frozenset({"the", "a", "an", "for", "of", "to", "on", "please",
                     "collision", "avoidance", "obstacle", "obstacles",
                     "object", "objects"})
EDIT_DISTANCE_THRESHOLD = 0.34

_PUNCT = str.maketrans({c: " " if c == "," else None for c in string.punctuation})
_VOWELISH = frozenset("aeiouyhw")
_NASALS = frozenset("mn")


def edit_distance(a: str, b: str) -> int:
    """Levenshtein distance (unit-cost insert/delete/substitute)."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1,
                           prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def normalized_edit_distance(a: str, b: str) -> float:
    if not a and not b:
        return 0.0
    return edit_distance(a, b) / max(len(a), len(b))


def phonetic_key(text: str) -> str:
    """Per-word consonant-skeleton key, blind to vowels and nasal confusions.

    Each word keeps its first letter plus subsequent consonants that are not
    vowel-like (a e i o u y h w) and not nasal (m n), deduplicated when
    adjacent and truncated to 4 characters.
    """
    keys = []
    for word in text.lower().split():
        letters = [c for c in word if c.isalpha()]
        if not letters:
            continue
        key = letters[0]
        for c in letters[1:]:
            if c in _VOWELISH or c in _NASALS:
                continue
            if key[-1] != c:
                key += c
        keys.append(key[:4].upper())
    return " ".join(keys)


def correct_phrase(phrase: str, vocabulary: list[str]) -> str:
    """Snap a phrase onto the vocabulary; unmatched phrases pass through."""
    vocab = [v.strip().lower() for v in vocabulary]
    if phrase in vocab:
        return phrase
    best, best_d = None, float("inf")
    for entry in vocab:
        d = normalized_edit_distance(phrase, entry)
        if d < best_d:
            best, best_d = entry, d
    if best is not None and best_d <= EDIT_DISTANCE_THRESHOLD:
        return best
    pk = phonetic_key(phrase)
    for entry in vocab:
        if phonetic_key(entry) == pk:
            return entry
    return phrase


def _strip_filler(tokens: list[str]) -> list[str]:
    lo, hi = 0, len(tokens)
    while lo < hi and tokens[lo] in _FILLER:
        lo += 1
    while hi > lo and tokens[hi - 1] in _FILLER:
        hi -= 1
    return tokens[lo:hi]


def _phrases(tokens: list[str]) -> list[str]:
    segments, cur = [], []
    for tok in tokens:
        if tok == "and":
            segments.append(cur)
            cur = []
        else:
            cur.append(tok)
    segments.append(cur)
    out = []
    for seg in segments:
        seg = _strip_filler(seg)
        if seg:
            out.append(" ".join(seg))
    return out


def parse_transcript(text: str, vocabulary: list[str]) -> Intent:
    """Extract an avoidance intent from operator text.

    Raises UnparseableError (carrying the raw text) when no verb from either
    set appears, or when the verbs govern no object phrase.
    """
    if not text or not text.strip():
        raise UnparseableError(text, "empty transcript")
    tokens = text.lower().replace(",", " and ").translate(_PUNCT).split()
    clauses = []  # (enable?, tokens)
    current = None
    for tok in tokens:
        if tok in ENABLE_VERBS or tok in DISABLE_VERBS:
            current = (tok in ENABLE_VERBS, [])
            clauses.append(current)
        elif current is not None:
            current[1].append(tok)
    if not clauses:
        raise UnparseableError(text)
    enable, disable = [], []
    for is_enable, clause_tokens in clauses:
        for phrase in _phrases(clause_tokens):
            corrected = correct_phrase(phrase, vocabulary)
            (enable if is_enable else disable).append(corrected)
    if not enable and not disable:
        raise UnparseableError(text, "command names no object")
    return Intent(enable=enable, disable=disable, raw_text=text)

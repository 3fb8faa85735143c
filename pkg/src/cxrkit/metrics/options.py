"""Multiple-choice answer extraction from free-form model responses."""

from __future__ import annotations

import re

# Leading option-letter forms: a bare letter, "(b)", "b)", "c.", "d:".
# A plain letter followed by more text ("a pneumothorax ...") is NOT treated
# as a letter answer; it falls through to text matching.
_LETTER_WHOLE = re.compile(r"^\(?([a-z])\)?$")
_LETTER_LEADING = re.compile(r"^(?:\(([a-z])\)|([a-z])[\).:])(?:\s|$)")


def _normalize(text: str) -> str:
    text = re.sub(r"[^a-z0-9]+", " ", text.lower())
    return " ".join(text.split())


def _find_occurrence(haystack: str, needle: str):
    m = re.search(r"(?<![a-z0-9])" + re.escape(needle) + r"(?![a-z0-9])", haystack)
    return None if m is None else m.start()


def match_option(response: str, options) -> int | None:
    """Locate which option a response selects; None when no option matches.

    The leading option-letter rule ("a", "(b)", "c.") is tried first; then the
    option whose normalized text occurs in the normalized response, preferring
    the longest option text, ties broken by earliest occurrence.
    """
    options = list(options)
    if len(options) < 2:
        raise ValueError("match_option requires at least 2 options")

    raw = response.strip().lower()
    m = _LETTER_WHOLE.match(raw) or _LETTER_LEADING.match(raw)
    if m:
        letter = next(g for g in m.groups() if g)
        idx = ord(letter) - ord("a")
        if 0 <= idx < len(options):
            return idx

    norm_response = _normalize(response)
    best = None  # (-len, position, index)
    for i, option in enumerate(options):
        norm_option = _normalize(option)
        if not norm_option:
            continue
        pos = _find_occurrence(norm_response, norm_option)
        if pos is None:
            continue
        key = (-len(norm_option), pos, i)
        if best is None or key < best:
            best = key
    return None if best is None else best[2]

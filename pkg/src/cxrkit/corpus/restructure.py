"""Deterministic report restructuring via header matching.

Headers are matched case-insensitively against a fixed synonym table; any text
before the first header becomes the indication when no indication-style header
is present.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_SYNONYMS = {
    "indication": "indication",
    "history": "indication",
    "reason": "indication",
    "findings": "findings",
    "report": "findings",
    "impression": "impression",
    "conclusion": "impression",
}

_HEADER = re.compile(
    r"\b(indication|history|reason|findings|report|impression|conclusion)\s*:",
    re.IGNORECASE,
)


@dataclass(frozen=True)
class RestructuredReport:
    sections: dict
    missing: frozenset

    def __getitem__(self, name: str) -> str:
        return self.sections[name]


def restructure_report(raw_text: str) -> RestructuredReport:
    """Split free-form report text into indication/findings/impression."""
    if not raw_text or not raw_text.strip():
        raise ValueError("empty report")

    matches = list(_HEADER.finditer(raw_text))
    parts = {"indication": [], "findings": [], "impression": []}

    preamble = raw_text[: matches[0].start()] if matches else raw_text
    preamble = preamble.strip()
    has_indication_header = any(
        _SYNONYMS[m.group(1).lower()] == "indication" for m in matches
    )
    if preamble and not has_indication_header:
        parts["indication"].append(preamble)

    for i, m in enumerate(matches):
        section = _SYNONYMS[m.group(1).lower()]
        end = matches[i + 1].start() if i + 1 < len(matches) else len(raw_text)
        body = raw_text[m.end():end].strip()
        if body:
            parts[section].append(body)

    sections = {name: " ".join(chunks) for name, chunks in parts.items()}
    missing = frozenset(name for name, text in sections.items() if not text)
    return RestructuredReport(sections=sections, missing=missing)

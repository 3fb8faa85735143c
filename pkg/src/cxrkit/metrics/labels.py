"""Rule-based finding labels extracted from report text, and F1 over them.

A deterministic keyword + negation matcher stands in for a learned report
labeler: it supports the standard 14-finding vocabulary, marks findings
negated in-sentence as absent, and hedged findings as uncertain.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

PRESENT = "present"
ABSENT = "absent"
UNCERTAIN = "uncertain"
LABEL_VALUES = (PRESENT, ABSENT, UNCERTAIN)

FINDINGS_14 = (
    "atelectasis",
    "cardiomegaly",
    "consolidation",
    "edema",
    "enlarged cardiomediastinum",
    "fracture",
    "lung lesion",
    "lung opacity",
    "no finding",
    "pleural effusion",
    "pleural other",
    "pneumonia",
    "pneumothorax",
    "support devices",
)

FINDINGS_5 = (
    "atelectasis",
    "cardiomegaly",
    "consolidation",
    "edema",
    "pleural effusion",
)

# Keywords are matched longest-first on word boundaries within one sentence.
# "no finding" phrases deliberately embed their own negation so the cue scan
# (which only looks before the match) leaves them positive.
_KEYWORDS = {
    "atelectasis": ("atelectasis", "atelectatic change"),
    "cardiomegaly": ("cardiomegaly", "enlarged heart"),
    "consolidation": ("consolidation",),
    "edema": ("edema", "pulmonary edema"),
    "enlarged cardiomediastinum": ("enlarged cardiomediastinum", "widened mediastinum"),
    "fracture": ("fracture", "rib fracture"),
    "lung lesion": ("lung lesion", "pulmonary nodule", "lung mass"),
    "lung opacity": ("lung opacity", "airspace opacity", "opacity"),
    "no finding": ("no acute findings", "no acute disease", "normal study", "unremarkable"),
    "pleural effusion": ("pleural effusion", "effusion"),
    "pleural other": ("pleural thickening", "pleural scarring"),
    "pneumonia": ("pneumonia", "pneumonic infiltrate"),
    "pneumothorax": ("pneumothorax",),
    "support devices": ("support device", "support devices", "pacemaker", "central line", "endotracheal tube"),
}

_NEGATION_CUES = ("no", "without", "free of", "negative for")
_PREFIX_HEDGES = ("possible", "possibly", "questionable")
_SUFFIX_HEDGES = ("cannot exclude", "cannot be excluded", "not excluded")

_SENTENCE_SPLIT = re.compile(r"(?<=[.!?;])\s+|\n+")
_PRIORITY = {PRESENT: 3, UNCERTAIN: 2, ABSENT: 1}


@dataclass(frozen=True)
class LabelVector:
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        missing = set(FINDINGS_14) - set(self.values)
        extra = set(self.values) - set(FINDINGS_14)
        if missing or extra:
            raise ValueError(f"label vector keys mismatch: missing={sorted(missing)} extra={sorted(extra)}")
        for finding, value in self.values.items():
            if value not in LABEL_VALUES:
                raise ValueError(f"bad label value {value!r} for {finding}")

    def __getitem__(self, finding: str) -> str:
        return self.values[finding]

    @classmethod
    def all_absent(cls) -> "LabelVector":
        return cls({f: ABSENT for f in FINDINGS_14})

    @classmethod
    def from_partial(cls, partial: dict) -> "LabelVector":
        values = {f: ABSENT for f in FINDINGS_14}
        values.update(partial)
        return cls(values)


def _boundary_search(sentence: str, phrase: str):
    m = re.search(r"(?<![a-z0-9])" + re.escape(phrase) + r"(?![a-z0-9])", sentence)
    return None if m is None else m.span()


def _classify_mention(sentence: str, span) -> str:
    start, end = span
    prefix, suffix = sentence[:start], sentence[end:]
    for hedge in _PREFIX_HEDGES:
        if _boundary_search(prefix, hedge) is not None:
            return UNCERTAIN
    for hedge in _SUFFIX_HEDGES:
        if _boundary_search(suffix, hedge) is not None:
            return UNCERTAIN
    for cue in _NEGATION_CUES:
        if _boundary_search(prefix, cue) is not None:
            return ABSENT
    return PRESENT


def label_extract(report_text: str) -> LabelVector:
    """Extract the 14-finding label vector from report text; unmatched findings are absent."""
    values = {f: ABSENT for f in FINDINGS_14}
    mentioned = {}
    for sentence in _SENTENCE_SPLIT.split(report_text.lower()):
        if not sentence.strip():
            continue
        for finding, keywords in _KEYWORDS.items():
            for keyword in sorted(keywords, key=len, reverse=True):
                span = _boundary_search(sentence, keyword)
                if span is None:
                    continue
                state = _classify_mention(sentence, span)
                prev = mentioned.get(finding)
                if prev is None or _PRIORITY[state] > _PRIORITY[prev]:
                    mentioned[finding] = state
                break
    values.update(mentioned)
    return LabelVector(values)


def _binary(value: str) -> bool:
    # uncertain scores as positive (the common "U-ones" convention)
    return value in (PRESENT, UNCERTAIN)


def label_f1(pred_vectors, ref_vectors, variant: str = "micro14") -> float:
    """F1 over binary per-finding decisions.

    Variants: micro/macro pooling over the 14-finding set or the 5-finding
    subset (atelectasis, cardiomegaly, consolidation, edema, pleural effusion).
    """
    preds = list(pred_vectors)
    refs = list(ref_vectors)
    if not preds or len(preds) != len(refs):
        raise ValueError("label_f1: empty input or length mismatch")
    if variant not in ("micro14", "macro14", "micro5", "macro5"):
        raise ValueError(f"unknown variant {variant!r}")
    findings = FINDINGS_5 if variant.endswith("5") else FINDINGS_14

    counts = {f: [0, 0, 0] for f in findings}  # tp, fp, fn
    for pred, ref in zip(preds, refs):
        for f in findings:
            p, r = _binary(pred[f]), _binary(ref[f])
            if p and r:
                counts[f][0] += 1
            elif p and not r:
                counts[f][1] += 1
            elif not p and r:
                counts[f][2] += 1

    def f1(tp, fp, fn):
        if tp == 0 and fp == 0 and fn == 0:
            return 1.0  # vacuous agreement: no positives on either side
        denom = 2 * tp + fp + fn
        return 2 * tp / denom if denom else 0.0

    if variant.startswith("micro"):
        tp = sum(c[0] for c in counts.values())
        fp = sum(c[1] for c in counts.values())
        fn = sum(c[2] for c in counts.values())
        return f1(tp, fp, fn)
    return sum(f1(*counts[f]) for f in findings) / len(findings)

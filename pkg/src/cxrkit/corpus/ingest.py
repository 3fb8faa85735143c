"""Source ingestion and quality-control filtering.

A SourceDescriptor declares how a source's raw record fields map onto the
canonical (ImageRecord, Annotation) pair; ingest_source applies it, rejecting
records that cannot satisfy the type invariants.
"""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field

from PIL import Image

from ..metrics.boxes import Box
from .restructure import restructure_report
from .types import Annotation, ImageRecord, SPLITS, VIEWS

_KNOWN_ID_KEYS = ("image_id", "patient_id", "study_id")


@dataclass(frozen=True)
class SourceDescriptor:
    source_id: str
    id_fields: dict                      # canonical id -> raw field name
    pixels_field: str
    split_field: str
    split_value_map: dict = field(default_factory=dict)
    view_field: str | None = None
    view_value_map: dict = field(default_factory=dict)
    labels_field: str | None = None      # raw field holding {finding: raw value}
    label_value_map: dict = field(default_factory=dict)
    boxes_field: str | None = None       # raw field holding {phrase: [[x1,y1,x2,y2], ...]}
    sections_fields: dict = field(default_factory=dict)  # section -> raw field
    report_text_field: str | None = None  # free-form report, restructured on ingest
    prior_field: str | None = None
    qa_field: str | None = None
    check_images: bool = True

    def mapped_fields(self) -> set:
        fields = {self.pixels_field, self.split_field}
        fields.update(self.id_fields.values())
        for f in (self.view_field, self.labels_field, self.boxes_field,
                  self.report_text_field, self.prior_field, self.qa_field):
            if f:
                fields.add(f)
        fields.update(self.sections_fields.values())
        return fields


@dataclass
class Rejection:
    index: int
    reason: str


@dataclass
class IngestResult:
    pairs: list
    rejections: list
    dropped_field_counts: Counter


def _readable_image(path: str) -> bool:
    if not os.path.isfile(path):
        return False
    try:
        with Image.open(path) as img:
            img.verify()
        return True
    except Exception:
        return False


def ingest_source(descriptor: SourceDescriptor, raw_records) -> IngestResult:
    """Map raw source records onto validated (ImageRecord, Annotation) pairs."""
    pairs = []
    rejections = []
    dropped = Counter()
    mapped = descriptor.mapped_fields()

    for index, raw in enumerate(raw_records):
        for key in raw:
            if key not in mapped:
                dropped[key] += 1

        ids = {}
        bad = None
        for canonical in _KNOWN_ID_KEYS:
            raw_field = descriptor.id_fields.get(canonical)
            value = raw.get(raw_field) if raw_field else None
            if not value:
                bad = f"no {canonical}"
                break
            ids[canonical] = str(value)
        if bad:
            rejections.append(Rejection(index, bad))
            continue

        raw_split = raw.get(descriptor.split_field)
        if raw_split is None:
            rejections.append(Rejection(index, "no split"))
            continue
        split = descriptor.split_value_map.get(raw_split, raw_split)
        if split not in SPLITS:
            rejections.append(Rejection(index, f"bad split {raw_split!r}"))
            continue

        view = "unknown"
        if descriptor.view_field:
            raw_view = raw.get(descriptor.view_field)
            view = descriptor.view_value_map.get(raw_view, raw_view or "unknown")
            if view not in VIEWS:
                view = "unknown"

        pixels_ref = raw.get(descriptor.pixels_field)
        if not pixels_ref:
            rejections.append(Rejection(index, "no pixels_ref"))
            continue
        if descriptor.check_images and not _readable_image(pixels_ref):
            rejections.append(Rejection(index, "unreadable image"))
            continue

        labels = {}
        if descriptor.labels_field:
            for finding, value in (raw.get(descriptor.labels_field) or {}).items():
                mapped_value = descriptor.label_value_map.get(value, value)
                labels[finding] = mapped_value

        boxes = {}
        if descriptor.boxes_field:
            for phrase, coords in (raw.get(descriptor.boxes_field) or {}).items():
                boxes[phrase] = [Box(*c) for c in coords]

        sections = {}
        if descriptor.report_text_field and raw.get(descriptor.report_text_field):
            sections = dict(restructure_report(raw[descriptor.report_text_field]).sections)
        for name, raw_field in descriptor.sections_fields.items():
            sections[name] = raw.get(raw_field) or ""

        prior = None
        if descriptor.prior_field and raw.get(descriptor.prior_field):
            study_id, progression = raw[descriptor.prior_field]
            prior = (str(study_id), dict(progression))

        qa = []
        if descriptor.qa_field:
            qa = [tuple(pair) for pair in (raw.get(descriptor.qa_field) or [])]

        try:
            record = ImageRecord(
                image_id=ids["image_id"],
                patient_id=ids["patient_id"],
                study_id=ids["study_id"],
                view=view,
                pixels_ref=str(pixels_ref),
                source_id=descriptor.source_id,
                split=split,
            )
            annotation = Annotation(labels=labels, boxes=boxes, sections=sections, prior=prior, qa=qa)
            annotation.validate()
        except ValueError as exc:
            rejections.append(Rejection(index, str(exc)))
            continue
        pairs.append((record, annotation))

    return IngestResult(pairs=pairs, rejections=rejections, dropped_field_counts=dropped)


@dataclass(frozen=True)
class QCRule:
    rule_id: str
    predicate: object  # (ImageRecord, Annotation) -> bool, True keeps the record


def default_qc_rules(min_image_size: int = 8, require_report: bool = False) -> list:
    def min_size(record, annotation):
        try:
            with Image.open(record.pixels_ref) as img:
                w, h = img.size
            return w >= min_image_size and h >= min_image_size
        except Exception:
            return False

    def view_in_enum(record, annotation):
        return record.view in VIEWS

    rules = [QCRule("min_size", min_size), QCRule("view_enum", view_in_enum)]
    if require_report:
        rules.append(QCRule("nonempty_report", lambda r, a: bool(a.sections.get("findings"))))
    return rules


def qc_filter(pairs, rules):
    """Partition pairs into (kept, rejection_log); total over its input."""
    kept = []
    log = []
    for record, annotation in pairs:
        failed = None
        for rule in rules:
            if not rule.predicate(record, annotation):
                failed = rule.rule_id
                break
        if failed is None:
            kept.append((record, annotation))
        else:
            log.append((record.image_id, failed))
    return kept, log

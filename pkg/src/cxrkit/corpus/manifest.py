"""Manifest IO and split-leakage validation.

Triplet manifests are UTF-8 JSON lines: a header object with per-task and
per-split counts, then one record per line with fields exactly
{instruction, images, response, task_id, source_id, split}. Dataset manifests
carry the canonical records plus annotations, one combined object per line.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .types import Annotation, ImageRecord, Triplet


def emit_manifest(triplets, path) -> dict:
    """Write a triplet manifest; returns the header stats."""
    triplets = list(triplets)
    per_task = {}
    per_split = {}
    for t in triplets:
        per_task[t.task_id] = per_task.get(t.task_id, 0) + 1
        per_split[t.split] = per_split.get(t.split, 0) + 1
    header = {
        "total": len(triplets),
        "per_task": dict(sorted(per_task.items())),
        "per_split": dict(sorted(per_split.items())),
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(header, sort_keys=True) + "\n")
        for t in triplets:
            f.write(json.dumps(t.to_dict(), sort_keys=True) + "\n")
    return header


def load_manifest(path):
    """Read a triplet manifest into (header, triplets)."""
    with open(path, encoding="utf-8") as f:
        lines = [line for line in f if line.strip()]
    if not lines:
        raise ValueError(f"empty manifest {path}")
    header = json.loads(lines[0])
    triplets = [Triplet.from_dict(json.loads(line)) for line in lines[1:]]
    return header, triplets


def write_dataset(pairs, path) -> int:
    """Write (ImageRecord, Annotation) pairs as one combined object per line."""
    pairs = list(pairs)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for record, annotation in pairs:
            obj = {"record": record.to_dict(), "annotation": annotation.to_dict()}
            f.write(json.dumps(obj, sort_keys=True) + "\n")
    return len(pairs)


def load_dataset(path):
    pairs = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            obj = json.loads(line)
            record = ImageRecord(**obj["record"])
            annotation = Annotation.from_dict(obj["annotation"])
            pairs.append((record, annotation))
    return pairs


@dataclass(frozen=True)
class LeakageEntry:
    kind: str  # image_id | study_id | patient_id | triplet_split
    offender: str
    splits: tuple

    def describe(self) -> str:
        return f"{self.kind} {self.offender!r} spans splits {list(self.splits)}"


@dataclass
class LeakageReport:
    entries: list

    @property
    def ok(self) -> bool:
        return not self.entries


def _iter_records(source):
    if isinstance(source, (str, Path)):
        source = load_dataset(source)
    for item in source:
        yield item[0] if isinstance(item, tuple) else item


def validate_splits(record_manifests, triplet_manifests=()) -> LeakageReport:
    """Check that no image, study, or patient id appears in more than one split.

    Triplet manifests, when provided, are additionally checked against the
    records: every triplet's split must equal the split of each referenced image.
    """
    id_splits = {"image_id": {}, "study_id": {}, "patient_id": {}}
    image_split = {}
    for source in record_manifests:
        for record in _iter_records(source):
            image_split[record.image_id] = record.split
            for kind in id_splits:
                id_splits[kind].setdefault(getattr(record, kind), set()).add(record.split)

    entries = []
    for kind, table in id_splits.items():
        for offender, splits in sorted(table.items()):
            if len(splits) > 1:
                entries.append(LeakageEntry(kind, offender, tuple(sorted(splits))))

    for source in triplet_manifests:
        triplets = load_manifest(source)[1] if isinstance(source, (str, Path)) else source
        for t in triplets:
            for image_id in t.images:
                record_split = image_split.get(image_id)
                if record_split is not None and record_split != t.split:
                    entries.append(
                        LeakageEntry("triplet_split", image_id, tuple(sorted({t.split, record_split})))
                    )
    return LeakageReport(entries=entries)

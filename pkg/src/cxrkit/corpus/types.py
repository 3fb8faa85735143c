"""Canonical record, annotation, task, and triplet types."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..metrics.boxes import Box
from ..metrics.labels import FINDINGS_14, LABEL_VALUES

VIEWS = ("AP", "PA", "lateral", "unknown")
SPLITS = ("train", "val", "test")
PROGRESSION = ("improved", "stable", "worsened")
SECTIONS = ("indication", "findings", "impression")
CATEGORIES = ("coarse_perception", "fine_perception", "text_generation", "question_answering", "misc")
ANSWER_FORMATS = ("mcq", "open_text", "box", "text_only")


@dataclass(frozen=True)
class ImageRecord:
    image_id: str
    patient_id: str
    study_id: str
    view: str
    pixels_ref: str
    source_id: str
    split: str

    def __post_init__(self):
        for name in ("image_id", "patient_id", "study_id", "source_id"):
            if not getattr(self, name):
                raise ValueError(f"ImageRecord.{name} must be non-empty")
        if self.view not in VIEWS:
            raise ValueError(f"bad view {self.view!r}")
        if self.split not in SPLITS:
            raise ValueError(f"bad split {self.split!r}")

    def to_dict(self) -> dict:
        return {
            "image_id": self.image_id,
            "patient_id": self.patient_id,
            "study_id": self.study_id,
            "view": self.view,
            "pixels_ref": self.pixels_ref,
            "source_id": self.source_id,
            "split": self.split,
        }


@dataclass
class Annotation:
    labels: dict = field(default_factory=dict)
    boxes: dict = field(default_factory=dict)
    sections: dict = field(default_factory=dict)
    prior: tuple | None = None
    qa: list = field(default_factory=list)

    def validate(self) -> None:
        for finding, value in self.labels.items():
            if value not in LABEL_VALUES:
                raise ValueError(f"bad label value {value!r} for {finding!r}")
        for phrase, boxes in self.boxes.items():
            if not isinstance(phrase, str) or not phrase:
                raise ValueError("box phrase must be a non-empty string")
            for b in boxes:
                if not isinstance(b, Box):
                    raise ValueError("boxes must be Box instances")
        if self.sections is None:
            raise ValueError("sections may be empty but never null")
        for name in self.sections:
            if name not in SECTIONS:
                raise ValueError(f"unknown section {name!r}")
        if self.prior is not None:
            study_id, progression = self.prior
            if not study_id:
                raise ValueError("prior study_id must be non-empty")
            for finding, value in progression.items():
                if value not in PROGRESSION:
                    raise ValueError(f"bad progression {value!r} for {finding!r}")

    def to_dict(self) -> dict:
        return {
            "labels": dict(self.labels),
            "boxes": {p: [[b.x1, b.y1, b.x2, b.y2] for b in bs] for p, bs in self.boxes.items()},
            "sections": dict(self.sections),
            "prior": None if self.prior is None else [self.prior[0], dict(self.prior[1])],
            "qa": [list(pair) for pair in self.qa],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Annotation":
        prior = d.get("prior")
        ann = cls(
            labels=dict(d.get("labels", {})),
            boxes={p: [Box(*b) for b in bs] for p, bs in d.get("boxes", {}).items()},
            sections=dict(d.get("sections", {})),
            prior=None if prior is None else (prior[0], dict(prior[1])),
            qa=[tuple(pair) for pair in d.get("qa", [])],
        )
        ann.validate()
        return ann


@dataclass(frozen=True)
class TaskSpec:
    task_id: str
    category: str
    required_annotations: frozenset
    answer_format: str
    mcq_k: int = 0
    n_images: int = 1
    placeholders: frozenset = frozenset()

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise ValueError(f"bad category {self.category!r}")
        if self.answer_format not in ANSWER_FORMATS:
            raise ValueError(f"bad answer_format {self.answer_format!r}")
        if self.answer_format == "mcq" and self.mcq_k < 2:
            raise ValueError("mcq tasks need k >= 2")
        if self.answer_format == "text_only" and self.n_images != 0:
            raise ValueError("text_only tasks take zero images")


@dataclass(frozen=True)
class InstructionTemplate:
    task_id: str
    template: str

    def placeholders(self) -> frozenset:
        import string

        return frozenset(
            name for _, name, _, _ in string.Formatter().parse(self.template) if name
        )


@dataclass(frozen=True)
class Triplet:
    instruction: str
    images: tuple
    response: str
    task_id: str
    source_id: str
    split: str

    def __post_init__(self):
        if not self.response:
            raise ValueError("triplet response must be non-empty")
        if self.split not in SPLITS:
            raise ValueError(f"bad split {self.split!r}")

    def to_dict(self) -> dict:
        return {
            "instruction": self.instruction,
            "images": list(self.images),
            "response": self.response,
            "task_id": self.task_id,
            "source_id": self.source_id,
            "split": self.split,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Triplet":
        return cls(
            instruction=d["instruction"],
            images=tuple(d["images"]),
            response=d["response"],
            task_id=d["task_id"],
            source_id=d["source_id"],
            split=d["split"],
        )


DEFAULT_SYNTH_FINDINGS = {
    "pleural effusion": "disc",
    "pneumonia": "square",
    "pneumothorax": "triangle",
    "atelectasis": "cross",
    "edema": "ring",
}

SHAPE_PRIMITIVES = ("disc", "square", "triangle", "cross", "ring")


@dataclass(frozen=True)
class SynthConfig:
    n_images: int = 2000
    image_size: int = 64
    findings: dict = None
    side_prob: float = 0.5
    severity_size_thresholds: int = 6
    noise_sigma: float = 3.0
    seed: int = 0

    def __post_init__(self):
        if self.findings is None:
            object.__setattr__(self, "findings", dict(DEFAULT_SYNTH_FINDINGS))
        if self.n_images < 1:
            raise ValueError("n_images must be >= 1")
        if self.image_size < 32:
            raise ValueError("image_size must be >= 32")
        unknown = set(self.findings) - set(FINDINGS_14)
        if unknown:
            raise ValueError(f"findings outside the 14-label vocabulary: {sorted(unknown)}")
        if "no finding" in self.findings:
            raise ValueError("'no finding' is derived, not drawable")
        bad_shapes = set(self.findings.values()) - set(SHAPE_PRIMITIVES)
        if bad_shapes:
            raise ValueError(f"unknown shape primitives: {sorted(bad_shapes)}")
        if not 0.0 <= self.side_prob <= 1.0:
            raise ValueError("side_prob must be in [0, 1]")
        if self.severity_size_thresholds < 4:
            raise ValueError("severity_size_thresholds must be >= 4 pixels")

    @classmethod
    def from_dict(cls, d: dict) -> "SynthConfig":
        return cls(**d)

    def to_dict(self) -> dict:
        return {
            "n_images": self.n_images,
            "image_size": self.image_size,
            "findings": dict(self.findings),
            "side_prob": self.side_prob,
            "severity_size_thresholds": self.severity_size_thresholds,
            "noise_sigma": self.noise_sigma,
            "seed": self.seed,
        }

"""Benchmark item and result containers."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..metrics.boxes import Box

MCQ_TASKS = ("view", "temporal", "disease_binary", "disease_single", "disease_multi", "finegrained", "vqa")
GENERATION_TASKS = ("findings_gen", "findings_summ")
ALL_TASKS = MCQ_TASKS + ("grounding",) + GENERATION_TASKS

# full-scale benchmark sample counts, kept as the reference profile; fixture
# builds keep the same task structure at smaller n
REFERENCE_PROFILE = {
    "view": 600,
    "temporal": 62,
    "disease": 2684,  # binary 433 + single 864 + multi 1387
    "finegrained": 380,
    "vqa": 238,
    "grounding": 149,
    "findings_gen": 2451,
    "findings_summ": 1394,
}


@dataclass(frozen=True)
class EvalItem:
    item_id: str
    task: str
    instruction: str
    images: tuple  # pixel refs (paths or arrays)
    answer: object  # option index (MCQ), Box (grounding), or reference text
    options: tuple | None = None

    def __post_init__(self):
        if self.task not in ALL_TASKS:
            raise ValueError(f"unknown task {self.task!r}")
        is_mcq = self.task in MCQ_TASKS
        if is_mcq != (self.options is not None):
            raise ValueError("options present iff the task is MCQ-formatted")
        if is_mcq and not isinstance(self.answer, int):
            raise ValueError("MCQ answer must be an option index")
        if self.task == "grounding" and not isinstance(self.answer, Box):
            raise ValueError("grounding answer must be a Box")
        if self.task in GENERATION_TASKS and not isinstance(self.answer, str):
            raise ValueError("generation answer must be reference text")


@dataclass
class ItemRow:
    item_id: str
    response: str
    parsed: object
    score: float
    error: str | None = None

    def to_dict(self) -> dict:
        parsed = self.parsed
        if isinstance(parsed, Box):
            parsed = parsed.as_text()
        return {
            "item_id": self.item_id,
            "response": self.response,
            "parsed": parsed,
            "score": self.score,
            "error": self.error,
        }


@dataclass
class EvalResult:
    task: str
    rows: list = field(default_factory=list)
    aggregates: dict = field(default_factory=dict)
    seed: int = 0

    @property
    def n(self) -> int:
        return len(self.rows)

    def primary_score(self) -> float:
        if self.task in MCQ_TASKS:
            return self.aggregates["accuracy"].point
        if self.task == "grounding":
            return self.aggregates["miou"].point
        return self.aggregates["rouge_l"].point
